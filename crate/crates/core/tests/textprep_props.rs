use proptest::prelude::*;

use proxima::textprep::{light_stem, normalize_text};
use proxima::Analyzer;

// Arabic letters, diacritics, tatweel, digits, punctuation and some Latin.
fn mixed_text() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            4 => prop::char::range('\u{0621}', '\u{064A}'),
            1 => prop::char::range('\u{064B}', '\u{0655}'),
            1 => Just('\u{0640}'),
            1 => Just('\u{0670}'),
            1 => Just('\u{0671}'),
            2 => Just(' '),
            1 => prop::sample::select(vec!['.', '،', '\n', '-', '7', '٣']),
            1 => prop::char::range('a', 'z'),
        ],
        0..80,
    )
    .prop_map(|cs| cs.into_iter().collect())
}

proptest! {
    #[test]
    fn normalization_is_idempotent(s in any::<String>()) {
        let once = normalize_text(&s);
        prop_assert_eq!(normalize_text(&once), once);
    }

    #[test]
    fn normalization_is_idempotent_on_arabic(s in mixed_text()) {
        let once = normalize_text(&s);
        prop_assert_eq!(normalize_text(&once), once);
    }

    #[test]
    fn positions_are_contiguous(s in mixed_text()) {
        let stream = Analyzer::default().preprocess(&s);
        let positions: Vec<usize> = stream.iter().map(|(p, _)| p).collect();
        prop_assert_eq!(positions, (0..stream.len()).collect::<Vec<_>>());
    }

    #[test]
    fn preprocessing_is_deterministic(s in mixed_text()) {
        let a = Analyzer::default();
        prop_assert_eq!(a.preprocess(&s), a.preprocess(&s));
        prop_assert_eq!(a.preprocess(&s), Analyzer::default().preprocess(&s));
    }

    #[test]
    fn no_output_stem_is_a_stemmed_stop_word(
        words in prop::collection::vec((any::<bool>(), 0usize..400, mixed_text()), 0..30)
    ) {
        let analyzer = Analyzer::default();
        let stops: Vec<&str> = analyzer.stoplist().iter().collect();
        let text: Vec<String> = words
            .into_iter()
            .map(|(stop, i, w)| if stop { stops[i % stops.len()].to_string() } else { w })
            .collect();
        let stemmed_stops: Vec<String> = stops.iter().map(|w| light_stem(w)).collect();
        for (_, term) in analyzer.preprocess(&text.join(" ")).iter() {
            prop_assert!(!stemmed_stops.iter().any(|s| s == term), "{} survived", term);
        }
    }

    #[test]
    fn stems_keep_two_characters(w in "[\u{0627}-\u{064A}]{1,8}") {
        let stem = light_stem(&w);
        prop_assert!(stem.chars().count() >= 2.min(w.chars().count()));
    }
}
