//! Character classes shared by the normalization stages.

/// Arabic letters, including extended-block letters and tatweel.
pub fn is_arabic_letter(c: char) -> bool {
    matches!(c,
        '\u{0620}'..='\u{064A}'
        | '\u{066E}'..='\u{066F}'
        | '\u{0671}'..='\u{06D3}'
        | '\u{06D5}'
        | '\u{06E5}'..='\u{06E6}'
        | '\u{06EE}'..='\u{06EF}'
        | '\u{06FA}'..='\u{06FC}'
        | '\u{06FF}')
}

/// Tashkeel and Quranic annotation marks.
pub fn is_arabic_diacritic(c: char) -> bool {
    matches!(c,
        '\u{064B}'..='\u{065F}'
        | '\u{0670}'
        | '\u{06D6}'..='\u{06DC}'
        | '\u{06DF}'..='\u{06E4}'
        | '\u{06E7}'..='\u{06E8}'
        | '\u{06EA}'..='\u{06ED}')
}

/// Arabic-Indic (U+0660..) and extended Arabic-Indic (U+06F0..) digits.
pub fn is_arabic_indic_digit(c: char) -> bool {
    matches!(c, '\u{0660}'..='\u{0669}' | '\u{06F0}'..='\u{06F9}')
}

pub fn is_digit(c: char) -> bool {
    c.is_ascii_digit() || is_arabic_indic_digit(c)
}

/// A letter or a mark that attaches to one; both belong to an Arabic word.
pub fn is_arabic_word_char(c: char) -> bool {
    is_arabic_letter(c) || is_arabic_diacritic(c)
}

pub const PUNCTUATION: &[char] = &['.', ',', '!', '?', ':', ';', '-', '_', '(', ')', '/'];

/// The whitelist applied by noise removal. Anything else (emoji, symbols,
/// other scripts, control characters) is dropped.
pub fn is_allowed(c: char) -> bool {
    is_arabic_word_char(c)
        || is_digit(c)
        || c.is_ascii_alphabetic()
        || c.is_whitespace()
        || matches!(c, '[' | ']' | '+')
        || PUNCTUATION.contains(&c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes_are_disjoint_where_it_matters() {
        for c in ['ا', 'ب', 'ي', 'ء', 'ـ', 'پ', 'ک'] {
            assert!(is_arabic_letter(c), "{c:?}");
            assert!(!is_digit(c));
        }
        for c in ['\u{064E}', '\u{0651}', '\u{0670}'] {
            assert!(is_arabic_diacritic(c));
            assert!(!is_arabic_letter(c));
        }
        for c in ['٠', '٩', '۴', '0', '9'] {
            assert!(is_digit(c));
            assert!(!is_arabic_word_char(c));
        }
    }

    #[test]
    fn whitelist() {
        for c in "abcXYZ019٣ابج[]+.,!?:;-_()/ \t\n".chars() {
            assert!(is_allowed(c), "{c:?}");
        }
        for c in "😂#@&<>\"'،؟*%$\u{200C}\u{FEFF}".chars() {
            assert!(!is_allowed(c), "{c:?}");
        }
    }
}
