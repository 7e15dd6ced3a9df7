use std::sync::LazyLock;

use regex::Regex;

use super::placeholder::{pieces, Piece, Placeholder};

static URL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(?:https?://|www\.)\S*").expect("url pattern"));

// Bare shortener links. The leading group keeps `at.co/x` style words out;
// the link itself is capture 1.
static SHORT_URL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)(?:^|[^A-Za-z0-9._-])((?:t\.co|bit\.ly|goo\.gl|tinyurl\.com|ow\.ly|buff\.ly|youtu\.be|fb\.me|is\.gd|dlvr\.it|ift\.tt)/\S+)",
    )
    .expect("short url pattern")
});

static EMAIL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,}")
        .expect("email pattern")
});

static MENTION: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"@[A-Za-z0-9_]+").expect("mention pattern"));

const URL_TRAILING: &[char] = &['.', ',', '!', '?', ':', ';', ')', '"', '\''];

#[derive(Debug, Clone)]
enum Part {
    Text(String),
    Token(Placeholder),
}

/// Replace URLs, then emails, then mentions with their placeholder tokens.
///
/// Each class only sees text left over by the previous one, so an `@` inside
/// a URL never becomes a mention. Existing placeholders are left alone.
pub fn replace_entities(text: &str) -> String {
    let mut parts: Vec<Part> = pieces(text)
        .into_iter()
        .map(|p| match p {
            Piece::Text(t) => Part::Text(t.to_owned()),
            Piece::Token(p) => Part::Token(p),
        })
        .collect();

    parts = expand(parts, Placeholder::Url, url_spans);
    parts = expand(parts, Placeholder::Email, |s| {
        EMAIL.find_iter(s).map(|m| (m.start(), m.end())).collect()
    });
    parts = expand(parts, Placeholder::Mention, |s| {
        MENTION.find_iter(s).map(|m| (m.start(), m.end())).collect()
    });

    let mut out = String::with_capacity(text.len());
    for part in &parts {
        match part {
            Part::Text(t) => out.push_str(t),
            Part::Token(p) => out.push_str(p.surface()),
        }
    }
    out
}

fn expand(parts: Vec<Part>, kind: Placeholder, find: impl Fn(&str) -> Vec<(usize, usize)>) -> Vec<Part> {
    let mut out = Vec::with_capacity(parts.len());
    for part in parts {
        let text = match part {
            Part::Text(t) => t,
            token => {
                out.push(token);
                continue;
            }
        };
        let mut last = 0;
        for (start, end) in find(&text) {
            if start > last {
                out.push(Part::Text(text[last..start].to_owned()));
            }
            out.push(Part::Token(kind));
            last = end;
        }
        if last < text.len() {
            out.push(Part::Text(text[last..].to_owned()));
        }
    }
    out
}

fn url_spans(s: &str) -> Vec<(usize, usize)> {
    let mut spans: Vec<(usize, usize)> = URL
        .find_iter(s)
        .map(|m| {
            let trimmed = m.as_str().trim_end_matches(URL_TRAILING);
            // never trim into the scheme itself
            let scheme = m.as_str().find("//").map_or(4, |i| i + 2);
            (m.start(), m.start() + trimmed.len().max(scheme.min(m.len())))
        })
        .collect();
    for caps in SHORT_URL.captures_iter(s) {
        let m = caps.get(1).expect("group 1");
        spans.push((m.start(), m.start() + m.as_str().trim_end_matches(URL_TRAILING).len()));
    }
    // leftmost wins, longest first among equal starts
    spans.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
    let mut kept: Vec<(usize, usize)> = Vec::with_capacity(spans.len());
    for span in spans {
        if kept.last().is_none_or(|&(_, end)| span.0 >= end) {
            kept.push(span);
        }
    }
    kept
}
