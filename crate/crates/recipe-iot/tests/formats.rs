//! Round-trip properties of the file formats.

use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use recipe_iot::formats::conll::{emit_conll, parse_conll};
use recipe_iot::formats::doccano::{emit_doccano, load_doccano};
use recipe_iot::formats::model::{load_model, save_model};
use recipe_iot_core::corpus::{Sentence, SlotLabel, SpanAnnotation, Tag, TagSequence, Token};
use recipe_iot_core::crf::{CrfModel, ModelMetadata};
use recipe_iot_core::features::FeatureIndex;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(13),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// A sentence whose text is its words joined by one or two spaces, with
/// optional lemma, POS and head columns.
fn sentence() -> impl Strategy<Value = (Sentence, TagSequence)> {
    let word = "[a-zA-Z0-9.,°é#=-]{1,6}";
    let token = (word, prop::option::of("[a-z]{1,5}"), prop::option::of("[A-Z]{2,3}"), any::<bool>(), 1usize..3);
    (
        prop::collection::vec(token, 1..10),
        "[ -~]{0,12}",
        prop::option::of("[a-z ]{1,8}"),
    )
        .prop_flat_map(|(tokens, id, device)| {
            let n = tokens.len();
            (
                Just((tokens, id, device)),
                prop::collection::vec(prop::option::of(0..n), n),
                prop::collection::vec(prop::sample::select(Tag::ALL.to_vec()), n),
            )
        })
        .prop_map(|((tokens, id, device), heads, tags)| {
            let mut text = String::new();
            let mut toks = Vec::new();
            for (i, (w, lemma, pos, _, gap)) in tokens.iter().enumerate() {
                if i > 0 {
                    text.push_str(&" ".repeat(*gap));
                }
                let start = text.chars().count();
                text.push_str(w);
                let mut t = Token::new(w.as_str(), start, start + w.chars().count());
                t.lemma = lemma.clone();
                t.pos = pos.clone();
                t.head = heads[i];
                toks.push(t);
            }
            let s = Sentence {
                id: id.clone(),
                recipe_id: format!("r{}", id.len()),
                text,
                tokens: toks,
                device_hint: device.map(|d| d.trim().to_string()).filter(|d| !d.is_empty()),
            };
            (s, TagSequence(tags))
        })
}

proptest! {
    #![proptest_config(config(300))]

    #[test]
    fn conll_round_trip(data in prop::collection::vec(sentence(), 1..5)) {
        let text = emit_conll(&data);
        let back = parse_conll(&text).unwrap();
        prop_assert_eq!(&back, &data);
        prop_assert_eq!(emit_conll(&back), text);
    }

    #[test]
    fn doccano_round_trip(data in prop::collection::vec(sentence(), 1..5), picks in prop::collection::vec((0usize..10, 0usize..4), 0..4)) {
        let rows: Vec<(Sentence, Vec<SpanAnnotation>)> = data
            .into_iter()
            .map(|(s, _)| {
                let spans = picks
                    .iter()
                    .filter(|(t, _)| *t < s.tokens.len())
                    .map(|&(t, l)| SpanAnnotation::new(s.tokens[t].start, s.tokens[t].end, SlotLabel::ALL[l]))
                    .collect();
                (s, spans)
            })
            .collect();
        let text = emit_doccano(&rows);
        let back = load_doccano(&text).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for ((a, sa), (b, sb)) in rows.iter().zip(&back) {
            prop_assert_eq!(&a.text, &b.text);
            prop_assert_eq!(&a.id, &b.id);
            prop_assert_eq!(&a.device_hint, &b.device_hint);
            prop_assert_eq!(sa, sb);
        }
        prop_assert_eq!(emit_doccano(&back), text);
    }

    #[test]
    fn model_round_trip(
        labels in 1usize..=9,
        features in prop::collection::btree_set("[ -~\t\n]{1,8}", 0..6),
        seed_weights in prop::collection::vec(prop_oneof![Just(0.0), -1e3f64..1e3, Just(f64::MIN_POSITIVE), Just(-1e-300)], 0..60),
        metadata in prop::collection::btree_map("[ -~\t\n\\\\]{1,6}", "[ -~\t\n\\\\]{0,10}", 0..4),
    ) {
        let index = FeatureIndex::from_keys(features);
        let n = index.len() * labels;
        let w = |k: usize| seed_weights.get(k % seed_weights.len().max(1)).copied().unwrap_or(0.0);
        let state = (0..n).map(w).collect();
        let trans = (0..labels * labels).map(|k| w(k + 7)).collect();
        let m = CrfModel::from_parts(Tag::ALL[..labels].to_vec(), index, state, trans, metadata.into_iter().collect::<ModelMetadata>()).unwrap();
        let text = save_model(&m);
        prop_assert_eq!(load_model(&text).unwrap(), m);
    }
}
