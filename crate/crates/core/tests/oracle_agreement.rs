use cdm_core::dispersion::{disk_distance, solve_dispersion};
use cdm_core::dp::{candidate_set, extract_optimum, filter_by_apollonius, solve_fast, OrderedInstance};
use cdm_core::geom::{apollonius_vertex, weighted_distance, ApolloniusDisk};
use cdm_core::io::{generate_disks, GeneratorSpec, Mode};
use cdm_core::oracles::{brute_dispersion, brute_mwis, brute_mwis_strongly_convex};
use cdm_core::reductions::{solve_convex_mwis, solve_convex_mwis_with};
use cdm_core::{Disk, PipelineOptions};

fn generated(mode: Mode, seed: u64, n: usize) -> Vec<Disk> {
    let mut s = GeneratorSpec::new(n, mode, seed);
    s.point_fraction = 0.2;
    s.weight_range = (0.5, 3.0);
    generate_disks(&s).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

/// Six disks of radius 1.1 centered on a hexagon of circumradius 2: only
/// neighbours overlap.
fn hexagon() -> Vec<Disk> {
    (0..6)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / 6.0;
            Disk::new(i, 2.0 * a.cos(), 2.0 * a.sin(), 1.1, 1.0 + (i % 2) as f64)
        })
        .collect()
}

#[test]
fn hexagon_has_closed_form_answers() {
    let d = hexagon();
    // Odd positions weigh 2 and are pairwise disjoint.
    let s = solve_convex_mwis(&d).unwrap();
    assert_eq!((s.chosen.clone(), s.total_weight), (vec![1, 3, 5], 6.0));
    assert_eq!(brute_mwis(&d).unwrap(), s);

    // Opposite disks are 4 apart, second neighbours 2√3.
    let r2 = solve_dispersion(&d, 2).unwrap();
    assert!(close(r2.r_star, 4.0 - 2.2), "{}", r2.r_star);
    let r3 = solve_dispersion(&d, 3).unwrap();
    assert!(close(r3.r_star, 2.0 * 3f64.sqrt() - 2.2), "{}", r3.r_star);
    assert!(r3.chosen == [0, 2, 4] || r3.chosen == [1, 3, 5], "{:?}", r3.chosen);
    let r4 = solve_dispersion(&d, 4).unwrap();
    assert_eq!(r4.r_star, 0.0);
}

#[test]
fn frozen_generated_instances() {
    let cases = [
        (Mode::StronglyConvex, 7, 9, 11.51125213643234, vec![0, 1, 3, 5, 6, 7, 8], 1.2309663300012106),
        (Mode::Convex, 11, 10, 10.770423090037927, vec![1, 2, 3, 4, 7, 8, 9], 1.1535543497240084),
        (Mode::Adversarial, 3, 8, 7.187911612284977, vec![0, 1, 2, 5, 6], 1.0053038875763773),
    ];
    for (mode, seed, n, weight, ids, r3) in cases {
        let d = generated(mode, seed, n);
        let s = solve_convex_mwis(&d).unwrap();
        assert!(close(s.total_weight, weight), "{mode:?}: {}", s.total_weight);
        assert_eq!(s.chosen, ids, "{mode:?}");
        let b = brute_mwis(&d).unwrap();
        assert!(close(b.total_weight, weight));

        let r = solve_dispersion(&d, 3).unwrap();
        assert!(close(r.r_star, r3), "{mode:?}: {}", r.r_star);
        assert!(close(brute_dispersion(&d, 3).unwrap().r_star, r3));
    }
}

/// Strongly convex instance none of whose optima (weight 3) is in strongly
/// convex position: the point 0 sits in a shallow pocket next to the larger
/// disks 1 and 3.
fn pocket_instance() -> Vec<Disk> {
    [
        (0.9974055516242903, 0.07198725990788284, 0.0),
        (0.5792295992060412, 0.24303335980443297, 0.371850222817661),
        (-0.8222775926668676, 0.0735194413277727, 0.17444228084575028),
        (0.7779590759191215, -0.002250126017416772, 0.22203767001735386),
    ]
    .iter()
    .enumerate()
    .map(|(i, &(x, y, r))| Disk::unit(i, x, y, r))
    .collect()
}

#[test]
fn auxiliary_points_recover_optima_outside_strong_convexity() {
    let d = pocket_instance();
    let plain = OrderedInstance::new(&d).unwrap();
    let restricted = extract_optimum(&plain, &solve_fast(&plain));
    assert_eq!(restricted.total_weight, 2.0);
    assert_eq!(brute_mwis_strongly_convex(&d).unwrap().total_weight, 2.0);

    let full = solve_convex_mwis_with(&d, &PipelineOptions::default()).unwrap();
    assert_eq!(full.solution.total_weight, 3.0);
    assert!(full.solution.total_weight > restricted.total_weight);
    assert_eq!(full.b_count, 4);
    let brute = brute_mwis(&d).unwrap();
    assert_eq!(brute.total_weight, 3.0);
    assert!(full.solution.chosen == [0, 1, 2] || full.solution.chosen == [0, 2, 3]);
}

#[test]
fn candidate_filter_matches_direct_recomputation() {
    for seed in 0..30 {
        let d = generated(Mode::StronglyConvex, 100 + seed, 9);
        let inst = OrderedInstance::new(&d).unwrap();
        let tol = *inst.tolerance();
        let n = inst.len();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let cands = candidate_set(&inst, i, j);
                for k in 0..n {
                    if k == i || k == j || cands.contains(&k) {
                        continue;
                    }
                    let Ok(ApolloniusDisk::Proper { center, radius }) =
                        apollonius_vertex(inst.disk(i), inst.disk(j), inst.disk(k), &tol)
                    else {
                        continue;
                    };
                    let tangent = ApolloniusDisk::Proper { center, radius };
                    let kept = filter_by_apollonius(&inst, &cands, &tangent);
                    let direct: Vec<usize> = cands
                        .iter()
                        .copied()
                        .filter(|&h| weighted_distance(inst.disk(h), center) - radius >= -tol.pred)
                        .collect();
                    assert_eq!(kept, direct, "seed {seed} pair ({i}, {j}) third {k}");
                }
            }
        }
    }
}

#[test]
fn dispersion_sets_realize_the_optimum() {
    for seed in 0..40 {
        let d = generated(if seed % 2 == 0 { Mode::StronglyConvex } else { Mode::Convex }, 200 + seed, 8);
        for k in 2..=4 {
            let r = solve_dispersion(&d, k).unwrap();
            let b = brute_dispersion(&d, k).unwrap();
            assert!((r.r_star - b.r_star).abs() <= 1e-9 * b.r_star.max(1e-300), "seed {seed} k {k}");
            let mut min = f64::INFINITY;
            for (x, &a) in r.chosen.iter().enumerate() {
                for &c in &r.chosen[x + 1..] {
                    min = min.min(disk_distance(&d[a], &d[c]));
                }
            }
            assert!(min >= r.r_star - 1e-9, "seed {seed} k {k}");
        }
    }
}
