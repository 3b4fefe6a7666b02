mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use refarray::optimizer::sample_statuses;
use refarray::{
    enumerate_placements, search_placements, ArrayLayout, LinkParams, PhaseMethod,
    PhaseSearchConfig, PlacementMode, PlacementSearchConfig, Room,
};

fn params(noise: f64) -> LinkParams {
    LinkParams::new(
        common::FC,
        common::ALPHA,
        1.0,
        noise,
        common::beta(),
        common::RATE,
    )
    .unwrap()
}

fn coarse() -> PhaseSearchConfig {
    PhaseSearchConfig {
        phase_step: PI / 8.0,
        max_sweeps: 10,
        ..PhaseSearchConfig::default()
    }
}

#[test]
fn worker_count_does_not_change_result() {
    let room = Room::new(4.0, 2).unwrap();
    let layouts = vec![ArrayLayout::wall_midpoint(&room, 0, 4, 0.0625).unwrap()];
    let run = |workers| {
        search_placements(
            &room,
            &layouts,
            2,
            &params(1e-5),
            &coarse(),
            &PlacementSearchConfig {
                mode: PlacementMode::Randomized,
                sample_budget: 700,
                seed: 9,
                parallel_workers: workers,
                ..PlacementSearchConfig::default()
            },
        )
        .unwrap()
    };
    let one = run(1);
    for w in [2, 3, 8] {
        assert_eq!(run(w), one, "{w} workers");
    }
    let trace = &one.objective_trace;
    assert!(trace.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
    assert_eq!(trace.last().map(|t| t.1), Some(one.best_capacity));
    assert_eq!(trace.last().map(|t| t.0), Some(one.best_index));
}

#[test]
fn exhaustive_two_pairs_matches_brute_force() {
    // M = 1, L = 2: 24 statuses, direct paths only, hand-computed SINR.
    let room = Room::new(1.0, 1).unwrap();
    let p = params(1e-3);
    let found = search_placements(
        &room,
        &[],
        2,
        &p,
        &PhaseSearchConfig::default(),
        &PlacementSearchConfig::default(),
    )
    .unwrap();
    assert_eq!(found.statuses_evaluated, 24);

    let space = enumerate_placements(&room, 2).unwrap();
    let mut best = 0.0f64;
    for (_, dep) in space.iter() {
        let xy = |q: &refarray::Point2D| (q.x, q.y);
        let tx: Vec<_> = dep.tx().iter().map(xy).collect();
        let rx: Vec<_> = dep.rx().iter().map(xy).collect();
        let all = common::all_paths(&tx, &rx, &[], common::ALPHA);
        let ok = (0..2).all(|l| common::sinr(&all, &[], l, 1.0, 1e-3) >= common::beta());
        if ok {
            let cap: f64 = (0..2)
                .map(|l| common::dist(tx[l], rx[l]).powf(common::ALPHA))
                .sum::<f64>()
                * common::RATE;
            best = best.max(cap);
        }
    }
    assert!((found.best_capacity - best).abs() <= 1e-9 * best.max(1.0));
}

#[test]
fn randomized_with_full_budget_equals_exhaustive() {
    let room = Room::new(2.0, 2).unwrap();
    let layouts = vec![ArrayLayout::wall_midpoint(&room, 1, 2, 0.0625).unwrap()];
    let phase = PhaseSearchConfig {
        method: PhaseMethod::Exhaustive,
        phase_step: PI / 2.0,
        ..PhaseSearchConfig::default()
    };
    let ex = search_placements(
        &room,
        &layouts,
        1,
        &params(1e-3),
        &phase,
        &PlacementSearchConfig::default(),
    )
    .unwrap();
    let rnd = search_placements(
        &room,
        &layouts,
        1,
        &params(1e-3),
        &phase,
        &PlacementSearchConfig {
            mode: PlacementMode::Randomized,
            sample_budget: 10_000,
            ..PlacementSearchConfig::default()
        },
    )
    .unwrap();
    assert_eq!(ex.statuses_evaluated, 72);
    assert_eq!(ex, rnd);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn samples_are_distinct_and_nested(total in 1u64..5000, budget in 1u64..300, seed in any::<u64>()) {
        let a = sample_statuses(total as u128, budget, seed);
        prop_assert_eq!(a.len() as u64, budget.min(total));
        let mut sorted = a.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), a.len());
        prop_assert!(a.iter().all(|&i| i < total as u128));
        if budget < total {
            let smaller = sample_statuses(total as u128, budget / 2, seed);
            prop_assert_eq!(&a[..smaller.len()], smaller.as_slice());
        }
    }
}
