use std::sync::LazyLock;

use regex::{Captures, Regex};

static MARKUP: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"<[A-Za-z/!][^<>]*>|&(#[0-9]{1,7}|#[xX][0-9A-Fa-f]{1,6}|[A-Za-z]{2,8});")
        .expect("markup pattern")
});

static LINE_BREAK_TAG: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^</?br\b[^>]*>$").expect("br pattern"));

/// Remove HTML tags and decode the common character entities.
///
/// `<br>` tags and line-break entities become a single space, every other
/// tag is dropped. Only the entities for `&`, `<`, `>`, quotes and the
/// non-breaking space are decoded; unknown entities are kept verbatim. The
/// pass repeats until nothing changes, so entity-escaped markup such as
/// `&lt;b&gt;` is removed as well and the function is idempotent.
pub fn strip_markup(text: &str) -> String {
    let mut current = text.to_owned();
    loop {
        let next = MARKUP.replace_all(&current, replace_one).into_owned();
        if next == current {
            return next;
        }
        current = next;
    }
}

fn replace_one(caps: &Captures<'_>) -> String {
    let whole = &caps[0];
    match caps.get(1) {
        None if LINE_BREAK_TAG.is_match(whole) => " ".to_owned(),
        None => String::new(),
        Some(entity) => decode_entity(entity.as_str())
            .map(str::to_owned)
            .unwrap_or_else(|| whole.to_owned()),
    }
}

fn decode_entity(name: &str) -> Option<&'static str> {
    if let Some(num) = name.strip_prefix('#') {
        let code = match num.strip_prefix(['x', 'X']) {
            Some(hex) => u32::from_str_radix(hex, 16).ok()?,
            None => num.parse::<u32>().ok()?,
        };
        return match code {
            10 | 13 => Some(" "),
            34 => Some("\""),
            38 => Some("&"),
            39 => Some("'"),
            60 => Some("<"),
            62 => Some(">"),
            160 => Some("\u{A0}"),
            _ => None,
        };
    }
    match name {
        "amp" | "AMP" => Some("&"),
        "lt" | "LT" => Some("<"),
        "gt" | "GT" => Some(">"),
        "quot" | "QUOT" => Some("\""),
        "apos" => Some("'"),
        "nbsp" => Some("\u{A0}"),
        "NewLine" => Some(" "),
        _ => None,
    }
}
