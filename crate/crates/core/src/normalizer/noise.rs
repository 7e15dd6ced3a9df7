use super::charclass::is_allowed;
use super::placeholder::{pieces, units, Piece, Unit};

/// Drop characters outside the allowed alphabet, cap runs of one repeated
/// character at `max_repeat`, collapse whitespace and trim.
///
/// Placeholder tokens are never filtered or truncated and they break runs.
///
/// # Panics
///
/// If `max_repeat` is zero.
pub fn remove_noise(text: &str, max_repeat: usize) -> String {
    assert!(max_repeat >= 1, "max_repeat must be at least 1");

    let mut filtered = String::with_capacity(text.len());
    for piece in pieces(text) {
        match piece {
            Piece::Text(t) => filtered.extend(t.chars().filter(|&c| is_allowed(c))),
            Piece::Token(p) => filtered.push_str(p.surface()),
        }
    }

    // Filtering can glue a placeholder surface together, so re-split.
    let mut out = String::with_capacity(filtered.len());
    let mut prev: Option<char> = None;
    let mut run = 0usize;
    for unit in units(&filtered) {
        match unit {
            Unit::Token(p) => {
                out.push_str(p.surface());
                prev = None;
            }
            Unit::Char(c) if c.is_whitespace() => {
                if !out.is_empty() && !out.ends_with(' ') {
                    out.push(' ');
                }
                prev = None;
            }
            Unit::Char(c) => {
                if prev == Some(c) {
                    run += 1;
                } else {
                    prev = Some(c);
                    run = 1;
                }
                if run <= max_repeat {
                    out.push(c);
                }
            }
        }
    }
    if out.ends_with(' ') {
        out.pop();
    }
    out
}
