use nestlab::arena::{Arena, ArenaConfig, Material, NestedAction, Scenario};
use proptest::prelude::*;

fn scenario() -> impl Strategy<Value = Scenario> {
    prop_oneof![
        Just(Scenario::Line),
        Just(Scenario::Zigzag),
        Just(Scenario::Diamond)
    ]
}

fn material() -> impl Strategy<Value = Material> {
    prop_oneof![Just(Material::Wood), Just(Material::Stone)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_walks_keep_arena_invariants(
        scenario in scenario(),
        material in material(),
        front_cell_drop in any::<bool>(),
        max_steps in 1usize..600,
        actions in prop::collection::vec(0usize..NestedAction::COUNT, 0..700),
    ) {
        let shape = scenario.shape();
        let cells = shape.cell_count() as i64;
        let mut arena = Arena::reset(shape, ArenaConfig { max_steps, front_cell_drop }).unwrap();
        arena.set_material(material).unwrap();
        let b0 = arena.state().blocks_remaining;
        let mut nested_return = 0;

        for a in actions {
            if arena.state().terminal {
                break;
            }
            let before = arena.state().clone();
            let out = arena.step(NestedAction::from_index(a).unwrap()).unwrap();
            let after = arena.state();

            prop_assert!(out.reward == 0 || out.reward == 1);
            nested_return += out.reward;
            prop_assert!(after.pos.x < 15 && after.pos.y < 15);
            prop_assert!(before.pos.manhattan(after.pos) <= 1);
            prop_assert_eq!(after.steps_taken, before.steps_taken + 1);
            prop_assert_eq!(after.k.count(), b0 - after.blocks_remaining);
            prop_assert!(after.blocks_remaining <= before.blocks_remaining);
            prop_assert_eq!(out.done, after.terminal);
            prop_assert_eq!(
                after.terminal,
                after.blocks_remaining == 0 || after.steps_taken >= max_steps
            );
        }
        prop_assert_eq!(nested_return as usize, arena.correct_placements());
        if !arena.state().terminal {
            prop_assert!(arena.main_reward().is_err());
            arena.abort();
        }
        let r = arena.main_reward().unwrap();
        let p = material.penalty();
        prop_assert!(r >= 225 - 2 * cells + p && r <= 225 + p, "reward {} out of bounds", r);
        prop_assert!(arena.step(NestedAction::F).is_err());
    }
}
