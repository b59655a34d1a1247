//! Library results against independent big-integer and closed-form oracles.

use hostlab::fourier::ft_adic;
use hostlab::host::weyl_sum;
use hostlab::{e, Complex64, MeasureGen, OrbitKernel, PrecisionBudget, UnitPoint};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use proptest::prelude::*;

/// `num/den` in [0,1) to double precision via a 64-bit integer quotient.
fn frac(num: &BigUint, den: &BigUint) -> f64 {
    let q = (num << 64u32) / den;
    q.to_u64().unwrap() as f64 / 2f64.powi(64)
}

fn point(base: u32, digits: &[u32]) -> UnitPoint {
    UnitPoint::from_digits(base, digits).unwrap()
}

proptest! {
    #[test]
    fn kernel_matches_bigint_orbit(
        base in 2u32..11,
        mult in 2u64..13,
        raw in proptest::collection::vec(0u32..1000, 1..80),
        steps in 1usize..300,
    ) {
        let digits: Vec<u32> = raw.iter().map(|d| d % base).collect();
        let x = point(base, &digits);
        let modulus = x.modulus();
        let mut kernel = OrbitKernel::new(&x, mult).unwrap();
        for _ in 0..steps {
            kernel.step();
        }
        let expect = (x.numerator() * BigUint::from(mult).pow(steps as u32)) % &modulus;
        prop_assert_eq!(kernel.numerator(), expect);
    }

    #[test]
    fn weyl_sum_matches_naive(
        raw in proptest::collection::vec(0u32..3, 300..400),
        m in prop_oneof![-5i64..0, 1i64..6],
    ) {
        let x = point(3, &raw);
        let n = 150;
        let budget = PrecisionBudget::new(3, 2, n, 16).unwrap();
        let acc = weyl_sum(&x, 2, &[m], &[n], &budget).unwrap();
        let modulus = x.modulus();
        let mut num = x.numerator().clone();
        let mut sum = Complex64::new(0.0, 0.0);
        for _ in 0..n {
            num = (num * 2u32) % &modulus;
            sum += e(m as f64 * frac(&num, &modulus));
        }
        let diff = (acc.at(n, m).unwrap() - sum / n as f64).norm();
        prop_assert!(diff < 1e-12, "diff {}", diff);
    }
}

#[test]
fn bernoulli_transform_is_a_finite_product() {
    let p = [0.2, 0.5, 0.3];
    let gen = MeasureGen::bernoulli(p.to_vec()).unwrap();
    let level = 7;
    let mu = gen.realize(level).unwrap();
    let h = 3f64.powi(-(level as i32));
    for xi in [0.5, 1.0, -2.0, 7.25, 40.0, 333.0] {
        // Atoms at the cylinder left ends, then the uniform cell profile.
        let atoms: Complex64 = (1..=level as i32)
            .map(|j| p.iter().enumerate().map(|(d, &pd)| pd * e(xi * d as f64 * 3f64.powi(-j))).sum::<Complex64>())
            .product();
        let cell = (e(xi * h) - 1.0) / Complex64::new(0.0, std::f64::consts::TAU * xi * h);
        let diff = (ft_adic(&mu, xi) - atoms * cell).norm();
        assert!(diff < 1e-12, "xi {xi}: diff {diff}");
    }
}

#[test]
fn lebesgue_correlation_integral() {
    let mu = MeasureGen::uniform(2).unwrap().realize(14).unwrap();
    for r in [0.01, 0.05, 0.2, 0.5] {
        // P(|X − Y| < r) for independent uniforms.
        let expect = 2.0 * r - r * r;
        let got = mu.correlation_integral(r).unwrap();
        assert!((got - expect).abs() < 1e-3, "r {r}: {got} vs {expect}");
    }
}

#[test]
fn rational_orbit_is_periodic() {
    // 2/9 under ×4 in base 3, exact at precision 2: the orbit of 2/9 mod 1
    // cycles through 8/9, 5/9, 2/9.
    let x = UnitPoint::from_ratio(3, 2, 2, 9).unwrap();
    let mut kernel = OrbitKernel::new(&x, 4).unwrap();
    let mut seen = Vec::new();
    for _ in 0..6 {
        kernel.step();
        seen.push(kernel.numerator().to_u64().unwrap());
    }
    assert_eq!(seen, [8, 5, 2, 8, 5, 2]);
}
