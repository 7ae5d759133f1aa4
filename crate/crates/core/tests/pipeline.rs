use anyonkit_core::braid_rep::{apply_word, build_rep, check_braid_relations, BraidWord};
use anyonkit_core::fusion_ring::{fibonacci_table, tensor_power, validate, Label, TAU};
use anyonkit_core::fusion_trees::{count_trees, enumerate_trees, format_tree, parse_tree, shape_of_left_comb};
use anyonkit_core::gate_search::{dist, search};
use anyonkit_core::model_store::{builtin_fibonacci, check_hexagon, check_pentagon, check_unitarity};
use anyonkit_core::solver::HexagonVariant;
use anyonkit_core::DEFAULT_TOL;

#[test]
fn table_to_search() {
    let table = fibonacci_table();
    assert!(validate(&table).passed());
    let powers = tensor_power(&table, TAU, 6).unwrap();
    let shape = shape_of_left_comb(6);
    for root in [Label::UNIT, TAU] {
        let trees = enumerate_trees(&table, &shape, &[TAU; 6], root).unwrap();
        assert_eq!(trees.len() as u64, powers.get(root));
        assert_eq!(count_trees(&table, &shape, &[TAU; 6], root).unwrap(), powers.get(root));
        for t in &trees {
            assert_eq!(&parse_tree(&format_tree(t, &table), &table).unwrap(), t);
        }
    }

    let model = builtin_fibonacci();
    assert!(check_pentagon(&model).passed(DEFAULT_TOL));
    assert!(check_hexagon(&model, HexagonVariant::Sigma).passed(DEFAULT_TOL));
    assert!(check_hexagon(&model, HexagonVariant::SigmaInverse).passed(DEFAULT_TOL));
    assert!(check_unitarity(&model).passed(DEFAULT_TOL));

    let rep = build_rep(&model, TAU, 4, TAU).unwrap();
    assert_eq!(rep.dim(), 3);
    assert!(check_braid_relations(&rep).passed(DEFAULT_TOL));
    let word = BraidWord::new(4, vec![2, -3, 1]).unwrap();
    let target = apply_word(&rep, &word).unwrap();
    let found = search(&rep, &target, 3, 0.0).unwrap();
    assert!(found.distance < 1e-12);
    assert!(dist(&apply_word(&rep, &found.word).unwrap(), &target).unwrap() < 1e-12);
}
