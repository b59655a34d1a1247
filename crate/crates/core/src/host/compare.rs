use std::collections::HashMap;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::adic::{KroneckerSchedule, OrbitKernel, PrecisionBudget, UnitPoint};
use crate::e;
use crate::error::{Error, Result};
use crate::fourier::{sinc, AdicTransform, LineMeasure};
use crate::measure::{CylinderWord, MeasureGen, PastWord, MAX_ATOMS};

/// Extra conditional-measure levels beyond `k`.
pub const COMPARE_EXTRA_LEVELS: usize = 7;
/// Agreement required between the routes of the lifting check.
pub const LIFTING_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareResult {
    pub k: usize,
    pub m: i64,
    pub n: usize,
    /// Level of the conditional measures `η`.
    pub level: usize,
    pub orbit_avg: Complex64,
    pub cond_avg: Complex64,
    pub gap: f64,
    /// `(1/N) Σ |F_m(…)|`, which bounds `|cond_avg|`.
    pub modulus_avg: f64,
}

/// Fails with a null-atom error unless every digit of `digits` has positive
/// probability after its predecessor, starting from `start`.
fn check_support(gen: &MeasureGen, start: Option<u32>, digits: &[u32]) -> Result<()> {
    let mut prev = start;
    for (j, &d) in digits.iter().enumerate() {
        if gen.next_law(prev)[d as usize] == 0.0 {
            return Err(Error::NullAtom(format!("digit {} of x is {d}, which has probability 0 there", j + 1)));
        }
        prev = Some(d);
    }
    Ok(())
}

/// `0.d_1 d_2 …` from enough leading digits to fill a double.
fn real_from_digits(base: u32, digits: &[u32]) -> f64 {
    let take = (64.0 / (base as f64).log2()).ceil() as usize;
    digits.iter().take(take).rev().fold(0.0, |s, &d| (s + d as f64) / base as f64)
}

fn fract(x: f64) -> f64 {
    x - x.floor()
}

/// `(1/N) Σ e_m(T_b^n T_a^k x)` against the average of
/// `F_m(T_b^n T_a^k (μ_ω)_{A_{n′}(x)})`, `n = 1..N`.
///
/// The conditioned measure is `R_{τ_n} S_{a^{k+z_n}} η_n mod 1` with
/// `η_n = μ_{ω·x_1…x_{n′}}` and `τ_n = T_b^n T_a^k x − a^{k+z_n} T_a^{n′}x`
/// mod 1, so each term is `e(m τ_n) η̂_n(m a^{k+z_n})`.
pub fn orbit_vs_conditional_compare(
    gen: &MeasureGen,
    omega: &PastWord,
    x: &UnitPoint,
    k: usize,
    m: i64,
    n: usize,
    b: u64,
) -> Result<CompareResult> {
    if m == 0 {
        return Err(Error::input("frequency m must be nonzero"));
    }
    if n == 0 {
        return Err(Error::input("N must be at least 1"));
    }
    let a = gen.base();
    if x.base() != a {
        return Err(Error::input(format!("point base {} does not match generator base {a}", x.base())));
    }
    let budget = PrecisionBudget::with_default_guard(a, b, n)?;
    budget.check(x, k)?;
    let schedule = KroneckerSchedule::with_default_bits(a as u64, b, n)?;
    let digits = x.digits();
    let start = gen.past_state(omega)?;
    let max_nprime = schedule.nprime(n) as usize;
    check_support(gen, start, &digits[..max_nprime.min(digits.len())])?;

    let mut level = k + COMPARE_EXTRA_LEVELS;
    while (a as f64).powi(level as i32) > MAX_ATOMS as f64 {
        level -= 1;
    }
    let mut transforms: HashMap<Option<u32>, AdicTransform> = HashMap::new();
    let mut kernel = OrbitKernel::new(&x.shift_digits(k), b)?;
    let ak = (a as f64).powi(k as i32);
    let mut orbit = Complex64::new(0.0, 0.0);
    let mut cond = Complex64::new(0.0, 0.0);
    let mut modulus = 0.0;
    for i in 1..=n {
        kernel.step();
        let orbit_x = kernel.to_real();
        orbit += e(m as f64 * orbit_x);

        let np = schedule.nprime(i) as usize;
        let state = if np == 0 { start } else if gen.is_markov() { Some(digits[np - 1]) } else { None };
        let eta = match transforms.get(&state) {
            Some(t) => t,
            None => {
                let t = AdicTransform::from_generator(gen, state, level)?;
                transforms.entry(state).or_insert(t)
            }
        };
        let s = ak * schedule.scale(i);
        let y = real_from_digits(a, &digits[np..]);
        let tau = fract(orbit_x - fract(s * y));
        let f = eta.fourier(m as f64 * s);
        cond += e(m as f64 * tau) * f;
        modulus += f.norm();
    }
    let nf = n as f64;
    let (orbit_avg, cond_avg) = (orbit / nf, cond / nf);
    Ok(CompareResult { k, m, n, level, orbit_avg, cond_avg, gap: (orbit_avg - cond_avg).norm(), modulus_avg: modulus / nf })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftingCheck {
    pub n: usize,
    pub m: i64,
    /// Closed form over the exact image intervals.
    pub direct: Complex64,
    /// Each image interval wrapped onto `[0,1)` piece by piece.
    pub wrapped: Complex64,
    /// `e(m τ_n) η̂(m a^{k+z_n})` from the equivariant conditional measure.
    pub lifted: Complex64,
    pub max_diff: f64,
    pub holds: bool,
}

/// Both sides of the lifting identity for one `n`:
/// `T_b^n T_a^k (μ_ω)_{A_{n′}(x)} = R_{τ_n} S_{a^k} S_{a^{z_n}} μ_{ω·x_1…x_{n′}}`
/// mod 1, compared through `F_m`.
///
/// The direct side pushes every level-`(n′+ℓ)` atom of `(μ_ω)_{A_{n′}(x)}`
/// forward under `×a^k b^n` in exact integer arithmetic, with weights taken
/// from cylinder probabilities of `μ_ω`; the lifted side uses the
/// conditional measure of the extended past and the schedule.
#[allow(clippy::too_many_arguments)]
pub fn lifting_identity_check(
    gen: &MeasureGen,
    omega: &PastWord,
    x: &UnitPoint,
    k: usize,
    b: u64,
    n: usize,
    m: i64,
    level: usize,
) -> Result<LiftingCheck> {
    if m == 0 {
        return Err(Error::input("frequency m must be nonzero"));
    }
    let a = gen.base();
    if level <= k {
        return Err(Error::input(format!("level {level} must exceed k = {k} so image intervals are shorter than 1")));
    }
    let schedule = KroneckerSchedule::with_default_bits(a as u64, b, n)?;
    let np = schedule.nprime(n) as usize;
    if x.precision() < np + level + 20 {
        return Err(Error::Precision(format!("x keeps {} digits, the check reads {}", x.precision(), np + level + 20)));
    }
    let digits = x.digits();
    let cyl = CylinderWord::new(a, digits[..np].to_vec())?;
    let start = gen.past_state(omega)?;
    let mf = m as f64;

    // Direct route.
    let p_cyl = gen.cylinder_prob_from(start, cyl.digits());
    if p_cyl == 0.0 {
        return Err(Error::NullAtom(format!("x lies in a null cylinder of length {np}")));
    }
    let big_a = BigUint::from(a);
    let modulus = big_a.pow((np + level) as u32);
    let mult = BigUint::from(b).pow(n as u32) * big_a.pow(k as u32);
    let width = ratio(&mult, &modulus);
    let base_index = BigUint::from(cyl.index()) * big_a.pow(level as u32);
    let atoms = crate::measure::atom_count(a, level)?;
    let sinc_w = sinc(std::f64::consts::PI * mf * width);
    let mut direct = Complex64::new(0.0, 0.0);
    let mut wrapped = Complex64::new(0.0, 0.0);
    for j in 0..atoms {
        let word = CylinderWord::from_index(a, level, j);
        let mut full = cyl.digits().to_vec();
        full.extend_from_slice(word.digits());
        let w = gen.cylinder_prob_from(start, &full) / p_cyl;
        if w == 0.0 {
            continue;
        }
        let start_num = (&mult * (&base_index + BigUint::from(j))) % &modulus;
        let s = ratio(&start_num, &modulus);
        direct += e(mf * (s + width / 2.0)) * (w * sinc_w);
        let end = s + width;
        let pieces: &[(f64, f64)] = if end <= 1.0 { &[(s, end)] } else { &[(s, 1.0), (0.0, end - 1.0)] };
        for &(u, v) in pieces {
            let integral = (e(mf * v) - e(mf * u)) / Complex64::new(0.0, std::f64::consts::TAU * mf * width);
            wrapped += integral * w;
        }
    }

    // Lifted route.
    let eta = AdicTransform::new(&gen.conditional_on_past(&omega.extended(&cyl)?, level)?);
    let mut orbit = x.mul_mod1((a as u64).pow(k as u32))?;
    for _ in 0..n {
        orbit = orbit.mul_mod1(b)?;
    }
    let scale = (a as f64).powi(k as i32) * schedule.scale(n);
    let y = x.shift_digits(np).to_real(53);
    let tau = fract(orbit.to_real(53) - fract(scale * y));
    let lifted = e(mf * tau) * eta.fourier(mf * scale);

    let max_diff = (direct - lifted).norm().max((direct - wrapped).norm());
    Ok(LiftingCheck { n, m, direct, wrapped, lifted, max_diff, holds: max_diff <= LIFTING_TOL })
}

/// `p / q` as a double, for `p, q` of any size.
fn ratio(p: &BigUint, q: &BigUint) -> f64 {
    if p.is_zero() {
        return 0.0;
    }
    let s = p.bits().min(q.bits()).saturating_sub(64);
    (p >> s).to_f64().unwrap_or(f64::INFINITY) / (q >> s).to_f64().unwrap_or(f64::INFINITY)
}
