use pconvex::combination::{combination_weight, eval_combination};
use pconvex::gluskin::{
    ball_volume_lp, random_gluskin_space, volume_mc, volume_upper_bound, RandomSpaceSpec,
    VolumeBoundMode,
};
use pconvex::norms::PNormedSpace;
use pconvex::rng::{self, domain};
use pconvex::{GeneratorSet, PBody, PCombination, PExponent, Sign, Term};
use rand::Rng;

fn p(v: f64) -> PExponent {
    PExponent::new(v).unwrap()
}

/// `2^n Γ(1+1/p)^n / Γ(1+n/p)` for `1/p` an integer, with factorials.
fn lp_volume_integer_inverse(n: u32, inv_p: u32) -> f64 {
    let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
    2f64.powi(n as i32) * fact(inv_p).powi(n as i32) / fact(n * inv_p)
}

#[test]
fn ball_volume_matches_factorial_form() {
    for n in 1..=4 {
        for inv_p in 1..=3 {
            let expected = lp_volume_integer_inverse(n, inv_p);
            let got = ball_volume_lp(n as usize, PExponent::envelope(1.0 / inv_p as f64).unwrap());
            assert!((got - expected).abs() <= 1e-12 * expected, "n={n} 1/p={inv_p}");
        }
    }
}

#[test]
fn random_bodies_sit_inside_euclidean_ball() {
    let mut rng = rng::stream(11, domain::SAMPLES, 0);
    for (k, n) in [2usize, 3, 4].into_iter().enumerate() {
        let space = random_gluskin_space(RandomSpaceSpec { n, p: p(0.5), seed: k as u64 }).unwrap();
        let gens = space.body().generators();
        for _ in 0..1000 {
            let support = rng.random_range(1..=gens.len());
            let terms: Vec<Term> = (0..support)
                .map(|_| {
                    let sign = if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
                    Term::new(rng.random_range(0..gens.len()), sign, rng.random::<f64>())
                })
                .collect();
            let comb = PCombination::new(n, terms).unwrap();
            let w = combination_weight(&comb, space.p());
            if w == 0.0 {
                continue;
            }
            let comb = comb.scaled(w.powf(-1.0 / space.p().value()));
            let x = eval_combination(&comb, gens).unwrap();
            assert!(x.norm() <= 1.0 + 1e-9, "{}", x.norm());
        }
    }
}

#[test]
fn monte_carlo_volume_matches_closed_form() {
    for (n, pv, samples) in [(2, 0.5, 200_000), (3, 0.5, 100_000), (2, 2.0 / 3.0, 200_000)] {
        let space: PNormedSpace = PBody::lp_ball(n, p(pv)).unwrap().into();
        let est = volume_mc(&space, samples, 2024).unwrap();
        let exact = ball_volume_lp(n, p(pv));
        assert!(
            (est.mean - exact).abs() <= 3.0 * est.std_error,
            "n={n} p={pv}: {} vs {exact} (σ={})",
            est.mean,
            est.std_error
        );
    }
}

#[test]
fn duplicated_generators_give_the_same_body() {
    let rows = [vec![1.0, 0.0], vec![0.0, 1.0]];
    let doubled = [rows[0].clone(), rows[1].clone(), rows[0].clone()];
    let a: PNormedSpace = PBody::new(GeneratorSet::from_rows(2, &rows).unwrap(), p(0.5)).unwrap().into();
    let b: PNormedSpace = PBody::new(GeneratorSet::from_rows(2, &doubled).unwrap(), p(0.5)).unwrap().into();
    // same sample points, same membership answers
    assert_eq!(volume_mc(&a, 20_000, 3).unwrap().hits, volume_mc(&b, 20_000, 3).unwrap().hits);
}

#[test]
fn upper_bound_dominates_random_volumes() {
    for seed in 0..20u64 {
        let n = 2 + (seed % 2) as usize;
        let space = random_gluskin_space(RandomSpaceSpec { n, p: p(0.5), seed }).unwrap();
        let est = volume_mc(&space, 20_000, seed).unwrap();
        let bound = volume_upper_bound(&space, VolumeBoundMode::Hadamard).unwrap();
        let exact = volume_upper_bound(&space, VolumeBoundMode::Determinant).unwrap();
        assert!(bound >= est.mean - 3.0 * est.std_error, "seed {seed}");
        assert!(exact >= est.mean - 3.0 * est.std_error && exact <= bound + 1e-12, "seed {seed}");
    }
}

#[test]
fn monte_carlo_is_bit_reproducible() {
    let space = random_gluskin_space(RandomSpaceSpec { n: 3, p: p(0.5), seed: 8 }).unwrap();
    let a = volume_mc(&space, 9_000, 1).unwrap();
    let b = volume_mc(&space, 9_000, 1).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
}
