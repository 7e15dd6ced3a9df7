use std::fmt;

/// Kind of entity replaced by a fixed token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Placeholder {
    Url,
    Email,
    Mention,
}

impl Placeholder {
    pub const ALL: [Placeholder; 3] = [Placeholder::Url, Placeholder::Email, Placeholder::Mention];

    /// Exact output token, brackets included.
    pub const fn surface(self) -> &'static str {
        match self {
            Placeholder::Url => "[رابط]",
            Placeholder::Email => "[بريد]",
            Placeholder::Mention => "[مستخدم]",
        }
    }

    /// Placeholder whose surface starts at the beginning of `s`, if any.
    pub fn at_start(s: &str) -> Option<Placeholder> {
        if !s.starts_with('[') {
            return None;
        }
        Self::ALL.into_iter().find(|p| s.starts_with(p.surface()))
    }
}

impl fmt::Display for Placeholder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.surface())
    }
}

/// A piece of text as seen by the stages that must not look inside
/// placeholders: either a run of ordinary text or an opaque placeholder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Piece<'a> {
    Text(&'a str),
    Token(Placeholder),
}

/// Split `s` into text runs and placeholder tokens, in order.
pub(crate) fn pieces(s: &str) -> Vec<Piece<'_>> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < s.len() {
        let rest = &s[i..];
        if let Some(p) = Placeholder::at_start(rest) {
            if start < i {
                out.push(Piece::Text(&s[start..i]));
            }
            out.push(Piece::Token(p));
            i += p.surface().len();
            start = i;
        } else {
            i += rest.chars().next().map_or(1, char::len_utf8);
        }
    }
    if start < s.len() {
        out.push(Piece::Text(&s[start..]));
    }
    out
}

/// One character or one whole placeholder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Unit {
    Char(char),
    Token(Placeholder),
}

pub(crate) fn units(s: &str) -> Vec<Unit> {
    let mut out = Vec::with_capacity(s.len());
    for piece in pieces(s) {
        match piece {
            Piece::Text(t) => out.extend(t.chars().map(Unit::Char)),
            Piece::Token(p) => out.push(Unit::Token(p)),
        }
    }
    out
}

/// Number of placeholder tokens in `s`.
pub fn count_placeholders(s: &str) -> usize {
    pieces(s)
        .iter()
        .filter(|p| matches!(p, Piece::Token(_)))
        .count()
}
