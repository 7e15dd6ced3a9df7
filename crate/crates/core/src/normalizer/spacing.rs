use super::charclass::{is_arabic_word_char, is_digit};
use super::placeholder::{units, Unit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Arabic,
    Digit,
    Latin,
    Bracket,
    Space,
    Other,
}

fn classify(unit: Unit) -> Class {
    match unit {
        // a placeholder is one opaque bracketed token
        Unit::Token(_) => Class::Bracket,
        Unit::Char(c) if c.is_whitespace() => Class::Space,
        Unit::Char('[' | ']') => Class::Bracket,
        Unit::Char(c) if is_digit(c) => Class::Digit,
        Unit::Char(c) if c.is_ascii_alphabetic() => Class::Latin,
        Unit::Char(c) if is_arabic_word_char(c) => Class::Arabic,
        Unit::Char(_) => Class::Other,
    }
}

fn needs_space(a: Class, b: Class) -> bool {
    use Class::*;
    match (a, b) {
        (Space, _) | (_, Space) => false,
        (Bracket, _) | (_, Bracket) => true,
        (Arabic, Digit) | (Digit, Arabic) => true,
        (Arabic, Latin) | (Latin, Arabic) => true,
        _ => false,
    }
}

/// Insert a space at Arabic/digit and Arabic/Latin boundaries and around
/// brackets and placeholder tokens. Never produces two consecutive spaces.
pub fn insert_spacing(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + text.len() / 4);
    let mut prev = Class::Space;
    for unit in units(text) {
        let class = classify(unit);
        if needs_space(prev, class) && !out.is_empty() {
            out.push(' ');
        }
        match unit {
            Unit::Char(' ') if out.ends_with(' ') => {}
            Unit::Char(c) => out.push(c),
            Unit::Token(p) => out.push_str(p.surface()),
        }
        prev = class;
    }
    out
}
