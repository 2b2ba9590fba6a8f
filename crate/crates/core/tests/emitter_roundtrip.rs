use parlanno::emitter::{emit_debate_xml, parse_debate_xml, XmlProfile};
use parlanno::synth::{meta_for, random_debate};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parse_inverts_emit(seed in any::<u64>(), n in 1usize..40, indent in 0usize..6, declaration: bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let debate = random_debate(&mut rng, meta_for(1 + (seed % 3) as u32, 1 + (seed % 200) as u32), n);
        let profile = XmlProfile { indent, declaration, strict: false };
        let xml = emit_debate_xml(&debate, &profile).unwrap();
        let (back, warnings) = parse_debate_xml(xml.as_bytes(), true).unwrap();
        prop_assert!(warnings.is_empty());
        prop_assert_eq!(&back, &debate);
        prop_assert_eq!(emit_debate_xml(&back, &profile).unwrap(), xml);
    }
}
