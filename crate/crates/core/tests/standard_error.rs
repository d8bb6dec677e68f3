use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dyadcode::evalstats::standard_error;

/// Box-Muller draw from N(mu, sigma^2).
fn normal(rng: &mut impl Rng, mu: f64, sigma: f64) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    mu + sigma * (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[test]
fn squared_se_is_unbiased_for_sigma2_over_n() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let sigma = 0.02;
    for n in [5usize, 20] {
        let reps = 20_000;
        let mut acc = 0.0;
        for _ in 0..reps {
            let xs: Vec<f64> = (0..n).map(|_| normal(&mut rng, 0.69, sigma)).collect();
            acc += standard_error(&xs).unwrap().powi(2);
        }
        let got = acc / reps as f64;
        let want = sigma * sigma / n as f64;
        // Var(s^2) = 2 sigma^4 / (n - 1); 5 standard errors of the average
        let tol = 5.0 * want * (2.0 / (n as f64 - 1.0) / reps as f64).sqrt();
        assert!(
            (got - want).abs() < tol,
            "n={n}: E[se^2]={got:e}, sigma^2/n={want:e}"
        );
    }
}

#[test]
fn se_shrinks_like_one_over_sqrt_n() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let se_at = |n: usize, rng: &mut ChaCha8Rng| -> f64 {
        let reps = 4000;
        (0..reps)
            .map(|_| {
                let xs: Vec<f64> = (0..n).map(|_| normal(rng, 0.5, 1.0)).collect();
                standard_error(&xs).unwrap().powi(2)
            })
            .sum::<f64>()
            / reps as f64
    };
    let ratio = se_at(10, &mut rng) / se_at(40, &mut rng);
    assert!((ratio - 4.0).abs() < 0.4, "variance ratio {ratio}");
}
