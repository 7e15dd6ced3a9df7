use nadi_core::normalizer::{
    count_placeholders, insert_spacing, is_allowed, remove_noise, replace_entities, segment,
    strip_markup, NormConfig, Normalizer, SegmentLexicon,
};
use proptest::prelude::*;

const ATOMS: &[&str] = &[
    "http://", "https://x.co/", "www.", "t.co/a", "@user", "a@b.com", "[رابط]", "[بريد]",
    "[مستخدم]", "[", "]", "<br>", "<b>", "&amp;", "&lt;", "&nbsp;", "&#10;", "ه", "ههههه", "وال",
    "كتاب", "ب", "ال", "هم", "ات", "٣", "7", "abc", "Z", " ", "  ", "\t", "\n", "😂", "❤️",
    "🇪🇬", "+", "#", "!", "!!!", ".", "؟", "ـ", "َ", "_", "(", "/", "\u{200f}",
];

fn fragment() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => proptest::sample::select(ATOMS).prop_map(str::to_owned),
        1 => any::<char>().prop_map(|c| c.to_string()),
        1 => "\\PC{1,3}",
    ]
}

fn text() -> impl Strategy<Value = String> {
    proptest::collection::vec(fragment(), 0..16).prop_map(|v| v.concat())
}

fn config() -> impl Strategy<Value = NormConfig> {
    (any::<[bool; 5]>(), 1usize..4).prop_map(|(f, max_repeat)| NormConfig {
        segment: f[0],
        strip_markup: f[1],
        replace_entities: f[2],
        remove_noise: f[3],
        insert_spacing: f[4],
        max_repeat,
    })
}

fn max_run(s: &str) -> usize {
    let chars: Vec<char> = s.chars().collect();
    chars.chunk_by(|a, b| a == b).map(<[char]>::len).max().unwrap_or(0)
}

fn without_placeholders(s: &str) -> String {
    s.replace("[رابط]", "\u{1}").replace("[بريد]", "\u{1}").replace("[مستخدم]", "\u{1}")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn idempotent_and_closed(s in text(), c in config()) {
        let n = Normalizer::new(c);
        let once = n.normalize(&s);
        prop_assert_eq!(&n.normalize(&once), &once);
        prop_assert!(!once.contains("  "));
        prop_assert_eq!(once.trim(), once.as_str());
        if c.remove_noise {
            prop_assert!(once.chars().all(|ch| ch == ' ' || (is_allowed(ch) && !ch.is_whitespace())), "{:?}", once);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn run_length_bound(s in text(), cap in 1usize..5) {
        let out = without_placeholders(&remove_noise(&s, cap));
        for piece in out.split('\u{1}') {
            prop_assert!(max_run(piece) <= cap, "{:?}", out);
        }
    }

    #[test]
    fn placeholders_survive_later_stages(s in text(), cap in 1usize..4, seg in any::<bool>()) {
        let after = replace_entities(&strip_markup(&s));
        let n0 = count_placeholders(&after);
        let noisy = remove_noise(&after, cap);
        let n1 = count_placeholders(&noisy);
        prop_assert!(n1 >= n0);
        let c = NormConfig { segment: seg, max_repeat: cap, ..NormConfig::default() };
        let out = Normalizer::new(c).normalize(&s);
        prop_assert!(count_placeholders(&out) >= n0, "{:?} -> {:?}", s, out);
        // spacing and segmentation never create or destroy placeholders
        let spaced = insert_spacing(&noisy);
        prop_assert_eq!(count_placeholders(&spaced), n1);
        prop_assert_eq!(count_placeholders(&segment(&spaced, &SegmentLexicon::default())), n1);
    }

    #[test]
    fn segmentation_reconstructs_tokens(words in proptest::collection::vec("[وفبكلاهمنيتدسع]{1,8}", 1..6), min in 1usize..4) {
        let lex = SegmentLexicon::default().with_min_stem_len(min).unwrap();
        let text = words.join(" ");
        let out = segment(&text, &lex);
        let pieces: Vec<&str> = out.split(' ').collect();
        let mut rebuilt = Vec::new();
        let mut cur = String::new();
        for (i, p) in pieces.iter().enumerate() {
            let stem_like = !p.starts_with('+') && !p.ends_with('+');
            let split = (i > 0 && pieces[i - 1].ends_with('+'))
                || pieces.get(i + 1).is_some_and(|n| n.starts_with('+'));
            if stem_like && split {
                prop_assert!(p.chars().count() >= min, "short stem {:?}", p);
            }
            cur.push_str(p.trim_matches('+'));
            let joins_next = p.ends_with('+') || pieces.get(i + 1).is_some_and(|n| n.starts_with('+'));
            if !joins_next {
                rebuilt.push(std::mem::take(&mut cur));
            }
        }
        prop_assert_eq!(rebuilt, words);
    }
}

/// Run-length oracle: every string of length <= 6 over a 3-symbol alphabet.
#[test]
fn run_length_exhaustive_oracle() {
    let symbols = ['a', 'ب', ' '];
    let mut total = 0;
    for len in 0..=6u32 {
        for code in 0..3usize.pow(len) {
            let mut k = code;
            let s: String = (0..len)
                .map(|_| {
                    let c = symbols[k % 3];
                    k /= 3;
                    c
                })
                .collect();
            for cap in 1..=3 {
                let chars: Vec<char> = s.chars().collect();
                let mut want = String::new();
                for run in chars.chunk_by(|a, b| a == b) {
                    let keep = if run[0] == ' ' { 1 } else { run.len().min(cap) };
                    want.extend(std::iter::repeat_n(run[0], keep));
                }
                assert_eq!(remove_noise(&s, cap), want.trim(), "{s:?} cap {cap}");
                total += 1;
            }
        }
    }
    assert_eq!(total, 3 * (0..=6).map(|l| 3usize.pow(l)).sum::<usize>());
}

/// Spacing oracle: class of each char, boundary set from adjacent pairs.
#[test]
fn spacing_matches_class_scan() {
    #[derive(PartialEq, Clone, Copy)]
    enum K {
        A,
        D,
        L,
        B,
        S,
        O,
    }
    fn k(c: char) -> K {
        match c {
            ' ' => K::S,
            '[' | ']' => K::B,
            '0'..='9' | '٠'..='٩' | '۰'..='۹' => K::D,
            'a'..='z' | 'A'..='Z' => K::L,
            'ا' | 'ب' | 'ـ' | 'َ' => K::A,
            _ => K::O,
        }
    }
    fn boundary(a: K, b: K) -> bool {
        a != K::S
            && b != K::S
            && (a == K::B
                || b == K::B
                || matches!((a, b), (K::A, K::D) | (K::D, K::A) | (K::A, K::L) | (K::L, K::A)))
    }
    let alphabet = ['ا', 'ب', 'َ', '1', '٣', 'a', 'Z', '[', ']', ' ', '.', '+'];
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20_000 {
        let n = rng.gen_range(0..10);
        let chars: Vec<char> = (0..n).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect();
        let mut want = String::new();
        for (i, &c) in chars.iter().enumerate() {
            if i > 0 && boundary(k(chars[i - 1]), k(c)) {
                want.push(' ');
            }
            if !(c == ' ' && want.ends_with(' ')) {
                want.push(c);
            }
        }
        let s: String = chars.iter().collect();
        assert_eq!(insert_spacing(&s), want, "{s:?}");
    }
}

#[test]
fn hand_segmented_fixture() {
    let lex = SegmentLexicon::default();
    let rows: Vec<(&str, &str)> = include_str!("fixtures/segment_hand.tsv")
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_once('\t').unwrap())
        .collect();
    assert_eq!(rows.len(), 30);
    for (token, want) in rows {
        assert_eq!(segment(token, &lex), want, "{token}");
    }
}

#[test]
fn segment_examples() {
    let lex = SegmentLexicon::new(["وال", "ال", "و"].map(String::from), Vec::new(), 2).unwrap();
    assert_eq!(segment("والكتاب", &lex), "وال+ كتاب");
    assert_eq!(segment("[رابط]", &lex), "[رابط]");
    assert_eq!(segment("اب", &SegmentLexicon::default()), "اب");
}
