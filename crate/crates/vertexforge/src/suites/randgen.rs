//! Seeded random generation of scalars, series, algebra elements, and
//! module vectors for the property suites.
//!
//! Every trial derives its own ChaCha stream from (seed, salt, trial), so
//! results are independent of scheduling and identical across runs.

use crate::current::{AlgebraContext, AlgebraKind, CurrentElement, GenMode, Sector};
use crate::scalar::Scalar;
use crate::series::LaurentSeries;
use crate::vacuum::{ModuleContext, ModuleKind, PbwMonomial, PbwVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Whether random coefficients are exact Laurent polynomials, capped
/// series, or a mix.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CoeffPolicy {
    Exact,
    Capped,
    Mixed,
}

impl CoeffPolicy {
    fn capped(self, rng: &mut ChaCha8Rng) -> bool {
        match self {
            CoeffPolicy::Exact => false,
            CoeffPolicy::Capped => true,
            CoeffPolicy::Mixed => rng.random_range(0..2) == 0,
        }
    }
}

pub fn trial_rng(seed: u64, salt: u64, trial: u64) -> ChaCha8Rng {
    let mixed = seed
        ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ trial.wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    ChaCha8Rng::seed_from_u64(mixed)
}

/// Small nonzero rational, with an imaginary part one time in four.
pub fn rand_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    let num = loop {
        let n: i64 = rng.random_range(-4..=4);
        if n != 0 {
            break n;
        }
    };
    let den: i64 = rng.random_range(1..=3);
    let re = Scalar::from_ratio(num, den);
    if rng.random_range(0..4) == 0 {
        let im: i64 = rng.random_range(-2..=2);
        &re + &(&Scalar::from_integer(im) * &Scalar::i())
    } else {
        re
    }
}

/// A random series with one to three terms at exponents in [-3, 3];
/// truncated at `val + trunc` when `capped`.
pub fn rand_series(rng: &mut ChaCha8Rng, trunc: i64, capped: bool) -> LaurentSeries {
    let n_terms = rng.random_range(1..=3);
    let mut terms = Vec::new();
    for _ in 0..n_terms {
        let e: i64 = rng.random_range(-3..=3);
        terms.push((e, rand_scalar(rng)));
    }
    let s = LaurentSeries::from_terms(terms);
    if capped && !s.is_zero() {
        let val = s.val().unwrap_or(0);
        s.truncated(val + trunc)
    } else {
        s
    }
}

pub fn rand_mode(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> i64 {
    rng.random_range(lo..=hi)
}

/// A random generator of the algebra, in the sectors it supports.
pub fn rand_gen(rng: &mut ChaCha8Rng, ctx: &AlgebraContext, mode_lo: i64, mode_hi: i64) -> GenMode {
    let mode = rand_mode(rng, mode_lo, mode_hi);
    match ctx.kind() {
        AlgebraKind::Hf => GenMode::new(Sector::Beta, 0, mode),
        AlgebraKind::Kl => {
            let sector = if rng.random_range(0..4) == 0 {
                Sector::CTilde
            } else {
                Sector::Beta
            };
            GenMode::new(sector, 0, mode)
        }
        _ => {
            let sector = if rng.random_range(0..2) == 0 {
                Sector::Plain
            } else {
                Sector::Copied
            };
            let base = rng.random_range(0..ctx.base().dim());
            GenMode::new(sector, base, mode)
        }
    }
}

/// A random element: one or two generator terms with random coefficients
/// (constant scalars where the algebra requires them, series for CheckGp
/// and Kgp).
pub fn rand_element(
    rng: &mut ChaCha8Rng,
    ctx: &AlgebraContext,
    trunc: i64,
    mode_lo: i64,
    mode_hi: i64,
) -> CurrentElement {
    rand_element_with(rng, ctx, trunc, mode_lo, mode_hi, CoeffPolicy::Mixed)
}

pub fn rand_element_with(
    rng: &mut ChaCha8Rng,
    ctx: &AlgebraContext,
    trunc: i64,
    mode_lo: i64,
    mode_hi: i64,
    policy: CoeffPolicy,
) -> CurrentElement {
    let n_terms = rng.random_range(1..=2);
    let mut out = CurrentElement::zero(ctx.kind());
    for _ in 0..n_terms {
        let g = rand_gen(rng, ctx, mode_lo, mode_hi);
        let coeff = match ctx.kind() {
            AlgebraKind::CheckGp | AlgebraKind::Kgp => {
                let capped = policy.capped(rng);
                rand_series(rng, trunc, capped)
            }
            _ => LaurentSeries::constant(rand_scalar(rng)),
        };
        out = out.add(&CurrentElement::term(ctx.kind(), g, coeff));
    }
    out
}

/// A random normal-ordered monomial of total creation depth <= max_depth.
pub fn rand_monomial(rng: &mut ChaCha8Rng, ctx: &ModuleContext, max_depth: i64) -> PbwMonomial {
    let mut word: Vec<GenMode> = Vec::new();
    let mut budget = max_depth;
    let n_factors = rng.random_range(0..=3usize);
    for _ in 0..n_factors {
        if budget <= 0 {
            break;
        }
        let depth = rng.random_range(1..=budget.min(3));
        budget -= depth;
        let sector = match ctx.kind() {
            ModuleKind::VKl => {
                if rng.random_range(0..4) == 0 {
                    Sector::CTilde
                } else {
                    Sector::Beta
                }
            }
            ModuleKind::Vf | ModuleKind::FockHf => Sector::Beta,
            _ => {
                if rng.random_range(0..2) == 0 {
                    Sector::Plain
                } else {
                    Sector::Copied
                }
            }
        };
        let base = match ctx.kind() {
            ModuleKind::Vcheck | ModuleKind::Mhat => rng.random_range(0..ctx.algebra().base().dim()),
            _ => 0,
        };
        word.push(GenMode::new(sector, base, -depth));
    }
    word.sort();
    PbwMonomial(word)
}

/// A random vector: one or two monomials, scalar coefficients (or series
/// where the module is over C((z))).
pub fn rand_vector(rng: &mut ChaCha8Rng, ctx: &ModuleContext, max_depth: i64, trunc: i64) -> PbwVector {
    let n_terms = rng.random_range(1..=2);
    let mut out = PbwVector::zero();
    for _ in 0..n_terms {
        let mono = rand_monomial(rng, ctx, max_depth);
        let coeff = if ctx.kind().scalar_coefficients() {
            LaurentSeries::constant(rand_scalar(rng))
        } else {
            let capped = rng.random_range(0..3) == 0;
            rand_series(rng, trunc, capped)
        };
        out = out.add(&PbwVector::monomial(mono, coeff));
    }
    if out.is_zero_exact() {
        PbwVector::one()
    } else {
        out
    }
}

/// The full default probe set: the cyclic vector, every monomial of
/// depth <= 2, and 8 seeded random vectors of depth <= 4.
pub fn spec_default_probes(ctx: &ModuleContext, seed: u64) -> Vec<PbwVector> {
    default_probes(ctx, seed, 4, 8)
}

/// The default probe set: the cyclic vector, every monomial of depth
/// <= 2, and `extra` seeded random vectors of depth <= max_depth.
pub fn default_probes(
    ctx: &ModuleContext,
    seed: u64,
    max_depth: i64,
    extra: usize,
) -> Vec<PbwVector> {
    let mut probes: Vec<PbwVector> = crate::vacuum::enumerate_monomials(ctx, 2)
        .into_iter()
        .map(|m| PbwVector::monomial(m, LaurentSeries::one()))
        .collect();
    let mut rng = trial_rng(seed, 0x5052_4f42, 0); // "PROB"
    for _ in 0..extra {
        probes.push(rand_vector(&mut rng, ctx, max_depth, 8));
    }
    probes
}
