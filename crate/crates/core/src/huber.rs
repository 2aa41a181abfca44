//! Effective upper bound for the Huber constant `C_Hub`, the implied constant
//! in the error term of the prime geodesic theorem.
//!
//! The bound is a chain of constants `A, B, C, C1, C10, C12, ..., C22, C_u`
//! in the genus `g`, the systole `l` and the spectral gap. Three views of the
//! same chain live here:
//!
//! * [`huber_chain`] evaluates it in log space, either with the crude
//!   displayed constants or with the exact definitions;
//! * [`huber_link_audit`] lists every displayed inequality as a numeric
//!   comparison;
//! * [`replay_constants`] re-derives the integer constants with exact
//!   rational posynomials.
//!
//! Notation for the replay and the paper-faithful values:
//! `E = e^{8 pi g/l}`, `P = 1/(1 - s1)`, `W = e^{l/2}`, `Q = 1/(1 - e^{-l/2})`.

use std::f64::consts::{E as EULER, LN_2, PI};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{domain, require_positive, Result};
use crate::exact::{integer, mono, rational, Atom, Monomial, Posynomial, Replay, ReplayStep};
use crate::invariants::{inverse_spectral_gap, require_genus, BoundOptions, Mode};
use crate::numerics::special::li_spec;
use crate::numerics::{li_with, LogScalar};

/// Integer constant produced by the aggregation.
pub const D3_EXACT: i64 = 39_512_073_856;
/// Rounded constant in the statement.
pub const D3_ROUNDED: f64 = 1e11;

/// `C1 = 2e - 2`.
pub const C1_EXACT: f64 = 2.0 * EULER - 2.0;
pub const C1_DISPLAYED: f64 = 4.0;
pub const C10_DISPLAYED: f64 = 5578.0;

/// `C10 = 8480 sqrt(e / 2 pi)`.
pub fn c10_exact() -> f64 {
    8480.0 * (EULER / (2.0 * PI)).sqrt()
}

/// Corrected `C22 = 1 / (1 + 1/log 2)`.
pub fn c22() -> f64 {
    1.0 / (1.0 + 1.0 / LN_2)
}

/// `8 pi g / l`, from Chang's inequality and `l/4 <= sinh(l/4)`.
pub fn diameter_bound(g: u64, ell: f64) -> Result<f64> {
    require_genus(g)?;
    require_positive("systole", ell)?;
    Ok(8.0 * PI * g as f64 / ell)
}

/// The sharper diameter bound `4 pi (g - 1) / (2 sinh(l/4))`.
pub fn chang_diameter(g: u64, ell: f64) -> Result<f64> {
    require_genus(g)?;
    require_positive("systole", ell)?;
    Ok(2.0 * PI * (g as f64 - 1.0) / (0.25 * ell).sinh())
}

/// Buser's bound `4g - 2` on the number of eigenvalues in `[0, 1/4)`.
pub fn n_ev_bound(g: u64) -> Result<u64> {
    require_genus(g)?;
    Ok(4 * g - 2)
}

/// Upper bound for `sup_{r >= 2} li(r) log r / r`, which is about 1.364515
/// at `r = 42.24` and tends to 1 from above as `r` grows. Tight mode uses it
/// in place of [`c22`], which does not bound `li`.
pub const C22_SUPREMUM_UPPER: f64 = 1.3646;

/// `C22 r / log r - li(r)` for `r >= 2`. The corrected `C22` would make this
/// nonnegative everywhere; it is not (see the tests).
pub fn c22_margin(r: f64) -> Result<f64> {
    if !(r >= 2.0 && r.is_finite()) {
        return Err(domain(format!("c22_margin needs r >= 2, got {r}")));
    }
    let li = li_with(r, &li_spec())?;
    Ok(c22() * r / r.ln() - li.value)
}

/// Optional sharper inputs used in tight mode.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct HuberOverrides {
    pub n_ev: Option<u64>,
    pub diameter: Option<f64>,
}

/// Every quantity of the chain. In paper-faithful mode each field holds the
/// displayed upper bound; in tight mode the exact definition.
#[derive(Debug, Clone, PartialEq)]
pub struct HuberBreakdown {
    pub genus: u64,
    pub systole: f64,
    pub lambda1: f64,
    pub mode: Mode,
    pub a: f64,
    pub b: LogScalar,
    pub c_big: LogScalar,
    pub c1: f64,
    pub c10: f64,
    pub c12: LogScalar,
    pub c13: LogScalar,
    pub c16: LogScalar,
    pub c17: LogScalar,
    pub c18: LogScalar,
    pub c19: LogScalar,
    pub c20: LogScalar,
    pub c21: LogScalar,
    pub c22: f64,
    /// `c = e^{l/2}`.
    pub c_mult: LogScalar,
    /// `mu = l/2`.
    pub mu: f64,
    pub c_u: LogScalar,
    pub final_bound: LogScalar,
}

impl HuberBreakdown {
    /// Named fields in chain order, for reports.
    pub fn entries(&self) -> Vec<(&'static str, LogScalar)> {
        let f = LogScalar::from_f64;
        vec![
            ("A", f(self.a)),
            ("B", self.b),
            ("C", self.c_big),
            ("C1", f(self.c1)),
            ("C10", f(self.c10)),
            ("C12", self.c12),
            ("C13", self.c13),
            ("C16", self.c16),
            ("C17", self.c17),
            ("C18", self.c18),
            ("C19", self.c19),
            ("C20", self.c20),
            ("C21", self.c21),
            ("C22", f(self.c22)),
            ("c", self.c_mult),
            ("mu", f(self.mu)),
            ("C_u", self.c_u),
            ("final", self.final_bound),
        ]
    }
}

/// Positive atoms of the chain in log space.
struct Atoms {
    g: LogScalar,
    e: LogScalar,
    p: LogScalar,
    w: LogScalar,
    q: LogScalar,
}

impl Atoms {
    fn new(g: u64, ell: f64, lambda1: f64) -> Result<Self> {
        require_genus(g)?;
        require_positive("systole", ell)?;
        require_positive("lambda1", lambda1)?;
        Ok(Self {
            g: ls(g as f64),
            e: LogScalar::exp(8.0 * PI * g as f64 / ell),
            p: ls(inverse_spectral_gap(lambda1)?),
            w: LogScalar::exp(0.5 * ell),
            q: LogScalar::exp(-(-(-0.5 * ell).exp_m1()).ln()),
        })
    }

    /// `g E W P Q^2`, the shape of the final bound.
    fn final_shape(&self) -> LogScalar {
        self.g * self.e * self.w * self.p * self.q * self.q
    }
}

fn ls(x: f64) -> LogScalar {
    LogScalar::from_f64(x)
}

/// `k1 g + k2 X`.
fn lin(k1: f64, g: LogScalar, k2: f64, x: LogScalar) -> LogScalar {
    g.scale(k1) + x.scale(k2)
}

/// Evaluates the chain. Overrides are only used in tight mode; a supplied
/// diameter larger than Chang's bound is replaced by that bound.
pub fn huber_chain(
    g: u64,
    ell: f64,
    lambda1: f64,
    opts: BoundOptions,
    overrides: HuberOverrides,
) -> Result<HuberBreakdown> {
    let at = Atoms::new(g, ell, lambda1)?;
    match opts.mode {
        Mode::PaperFaithful => Ok(paper_chain(g, ell, lambda1, &at, opts.rounded)),
        Mode::Tight => tight_chain(g, ell, lambda1, &at, overrides),
    }
}

fn paper_chain(g: u64, ell: f64, lambda1: f64, at: &Atoms, rounded: bool) -> HuberBreakdown {
    let Atoms { g: gl, e, p, w, q } = *at;
    let c16 = (gl * e * p).scale(42_761_980.0);
    let c20 = lin(208.0, gl, 45.0, c16) * q;
    let c_u = (gl * w * q).scale(384.0) + (c16 * q).scale(69.0) + lin(3952.0, gl, 855.0, c16) * w * q * q;
    let d3 = if rounded { D3_ROUNDED } else { D3_EXACT as f64 };
    HuberBreakdown {
        genus: g,
        systole: ell,
        lambda1,
        mode: Mode::PaperFaithful,
        a: 4.0 * g as f64,
        b: e.scale(0.5),
        c_big: lin(3.0, gl, 1118.0, e),
        c1: C1_DISPLAYED,
        c10: C10_DISPLAYED,
        c12: (gl * p).scale(102.0),
        c13: lin(114_349.0, gl, 42_614_061.0, e),
        c16,
        c17: lin(16.0, gl, 4.0, c16),
        c18: lin(16.0, gl, 5.0, c16),
        c19: lin(112.0, gl, 25.0, c16) * q,
        c20,
        c21: (w * q).scale(18.0),
        c22: c22(),
        c_mult: w,
        mu: 0.5 * ell,
        c_u,
        final_bound: at.final_shape().scale(d3),
    }
}

fn tight_chain(g: u64, ell: f64, lambda1: f64, at: &Atoms, overrides: HuberOverrides) -> Result<HuberBreakdown> {
    let gf = g as f64;
    let a = match overrides.n_ev {
        Some(n) if n >= 1 && n <= 4 * g - 2 => n as f64,
        Some(n) => {
            return Err(domain(format!(
                "n_ev must lie in [1, 4g - 2] = [1, {}], got {n}",
                4 * g - 2
            )))
        }
        None => n_ev_bound(g)? as f64,
    };
    let chang = chang_diameter(g, ell)?;
    let d = match overrides.diameter {
        Some(d) => {
            require_positive("diameter", d)?;
            d.min(chang)
        }
        None => chang,
    };
    let p = at.p;
    let c1 = C1_EXACT;
    let c10 = c10_exact();
    let b = LogScalar::exp(d) / ls(2.0 * (gf - 1.0));
    let c_big = (ls(gf - 1.0) + b.scale(745.0)).scale(3.0);
    let c12 = ls(a - 1.0) * (ls(1.0 + 3.0 * c1) + p.scale(2.0 * (1.0 + c1))) + ls(2.0 * c1 + 2.0);
    let c13 = c_big.scale(41.0 / 6.0 * c10);
    let c16 = c12 + c13 + ls(6.0 * (gf - 1.0) * c10);
    let c17 = ls(4.0 * a) + c16.scale(4.0);
    let c18 = ls(4.0 * a) + c16.scale(5.0);
    let c = at.w;
    let mu = 0.5 * ell;
    let jump = ls(8.0 * a) + c18.scale(4.0);
    // 1 / (1 - 1/c) = Q
    let c19 = c18 + jump * at.q;
    let c20 = c19 + jump.scale(1.0 / mu);
    let c21 = (c - ls(2.0)).abs().scale(1.0 / LN_2) + (ls(2.0) - c.powf(0.5)).abs().scale(2.0 / mu);
    let c22 = C22_SUPREMUM_UPPER;
    let c_u = c21.scale(a) + c20 * c.powf(0.75).scale(1.0 / mu) + c20.scale(1.0 + c22) + (c20 * c21).scale(0.75);
    Ok(HuberBreakdown {
        genus: g,
        systole: ell,
        lambda1,
        mode: Mode::Tight,
        a,
        b,
        c_big,
        c1,
        c10,
        c12,
        c13,
        c16,
        c17,
        c18,
        c19,
        c20,
        c21,
        c22,
        c_mult: c,
        mu,
        c_u,
        final_bound: c_u,
    })
}

/// One displayed inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub name: String,
    pub lhs: LogScalar,
    pub rhs: LogScalar,
}

impl Link {
    fn new(name: &str, lhs: LogScalar, rhs: LogScalar) -> Self {
        Self {
            name: name.to_string(),
            lhs,
            rhs,
        }
    }

    /// `log(rhs / lhs)`; negative when the link fails.
    pub fn margin(&self) -> f64 {
        self.rhs.ln_abs() - self.lhs.ln_abs()
    }

    /// `lhs <= rhs (1 + slack)`.
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs.le_with_slack(&self.rhs, slack.ln_1p())
    }
}

/// Every inequality of the chain at one point. Each link is evaluated with
/// the upper bounds produced by the previous links (and `A = 4g - 2`, the
/// largest admissible eigenvalue count), so it covers every surface with
/// these invariants.
pub fn huber_link_audit(g: u64, ell: f64, lambda1: f64) -> Result<Vec<Link>> {
    let at = Atoms::new(g, ell, lambda1)?;
    let Atoms { g: gl, e, p, w, q } = at;
    let gf = g as f64;
    let mut links = Vec::new();
    let mut push = |name: &str, lhs: LogScalar, rhs: LogScalar| links.push(Link::new(name, lhs, rhs));

    let a = ls(4.0 * gf - 2.0);
    push("A <= 4g", a, ls(4.0 * gf));

    let chang = chang_diameter(g, ell)?;
    push("Chang diameter <= 8 pi g / l", ls(chang), ls(diameter_bound(g, ell)?));
    push("B <= E/2", LogScalar::exp(chang) / ls(2.0 * (gf - 1.0)), e.scale(0.5));

    let b = e.scale(0.5);
    let c_big = lin(3.0, gl, 1118.0, e);
    push("C <= 3g + 1118 E", (ls(gf - 1.0) + b.scale(745.0)).scale(3.0), c_big);

    push("C1 <= 4", ls(C1_EXACT), ls(C1_DISPLAYED));
    push("C10 <= 5578", ls(c10_exact()), ls(C10_DISPLAYED));

    let four_g = ls(4.0 * gf);
    let c12_def = (four_g - LogScalar::ONE) * (ls(1.0 + 3.0 * C1_EXACT) + p.scale(2.0 * (1.0 + C1_EXACT)))
        + ls(2.0 * C1_EXACT + 2.0);
    let c12_first = four_g * (ls(13.0) + p.scale(10.0)) + ls(10.0);
    let c12_second = (gl * p).scale(92.0) + ls(10.0);
    let c12 = (gl * p).scale(102.0);
    push("C12 <= 4g (13 + 10 P) + 10", c12_def, c12_first);
    push("4g (13 + 10 P) + 10 <= 92 g P + 10", c12_first, c12_second);
    push("92 g P + 10 <= 102 g P", c12_second, c12);

    let c13_def = c_big.scale(41.0 / 6.0 * c10_exact());
    let c13_first = c_big.scale(41.0 * 5578.0 / 6.0);
    let c13 = lin(114_349.0, gl, 42_614_061.0, e);
    push("C13 <= 41 * 5578 / 6 * (3g + 1118 E)", c13_def, c13_first);
    push("41 * 5578 / 6 * (3g + 1118 E) <= 114349 g + 42614061 E", c13_first, c13);

    let c16_def = c12 + c13 + ls(6.0 * (gf - 1.0) * c10_exact());
    let c16_first = c12 + c13 + gl.scale(6.0 * 5578.0);
    let c16_second = (gl * p).scale(147_919.0) + e.scale(42_614_061.0);
    let c16 = (gl * e * p).scale(42_761_980.0);
    push(
        "C16 <= 102 g P + 114349 g + 42614061 E + 6 * 5578 g",
        c16_def,
        c16_first,
    );
    push("... <= 147919 g P + 42614061 E", c16_first, c16_second);
    push("147919 g P + 42614061 E <= 42761980 g E P", c16_second, c16);

    push(
        "C17 <= 16 g + 4 C16",
        a.scale(4.0) + c16.scale(4.0),
        lin(16.0, gl, 4.0, c16),
    );
    let c18 = lin(16.0, gl, 5.0, c16);
    push("C18 <= 16 g + 5 C16", a.scale(4.0) + c16.scale(5.0), c18);

    let jump = a.scale(8.0) + c18.scale(4.0);
    let jump_bound = lin(96.0, gl, 20.0, c16);
    let inv_one_minus_inv_c = (LogScalar::ONE - w.recip()).recip();
    let c19_first = c18 + jump_bound * q;
    let c19 = lin(112.0, gl, 25.0, c16) * q;
    push(
        "C19 <= 16 g + 5 C16 + (96 g + 20 C16) Q",
        c18 + jump * inv_one_minus_inv_c,
        c19_first,
    );
    push("16 g + 5 C16 + (96 g + 20 C16) Q <= (112 g + 25 C16) Q", c19_first, c19);

    let mu = 0.5 * ell;
    push("1/mu = 2/l <= Q", ls(1.0 / mu), q);

    let c20_def = c19 + jump.scale(1.0 / mu);
    let c20_first = c19 + jump * q;
    let c20_second = c19 + jump_bound * q;
    let c20 = lin(208.0, gl, 45.0, c16) * q;
    push("C20 <= (112 g + 25 C16) Q + (8A + 4 C18) Q", c20_def, c20_first);
    push("... <= (112 g + 25 C16) Q + (96 g + 20 C16) Q", c20_first, c20_second);
    push("... = (208 g + 45 C16) Q", c20_second, c20);

    let c = w;
    let two = ls(2.0);
    let sqrt_c = c.powf(0.5);
    let c21_def = (c - two).abs().scale(1.0 / LN_2) + (two - sqrt_c).abs().scale(2.0 / mu);
    let c21_first = (c + two).scale(1.0 / LN_2) + (sqrt_c + two).scale(2.0 / mu);
    let c21_second = (w + two).scale(1.0 / LN_2) + (LogScalar::exp(0.25 * ell) + two).scale(4.0 / ell);
    let c21_third = w.scale(6.0) + w.scale(12.0 / ell);
    let c21_fourth = w.scale(12.0) * ls(1.0 + 1.0 / ell);
    let c21 = (w * q).scale(18.0);
    push("C21 <= (c + 2)/log 2 + 2 (sqrt c + 2)/log c", c21_def, c21_first);
    push("... <= (e^{l/2} + 2)/log 2 + 4 (e^{l/4} + 2)/l", c21_first, c21_second);
    push("... <= 3 e^{l/2} / (1/2) + 4 * 3 e^{l/2} / l", c21_second, c21_third);
    push("... <= 12 e^{l/2} (1 + 1/l)", c21_third, c21_fourth);
    push("12 e^{l/2} (1 + 1/l) <= 18 W Q", c21_fourth, c21);

    push("C22 <= 1/2", ls(c22()), ls(0.5));

    let c_u_def =
        c21_def * a + c20 * c.powf(0.75).scale(1.0 / mu) + c20.scale(1.0 + c22()) + (c20 * c21_def).scale(0.75);
    let c_u_first = (gl * w * q).scale(72.0)
        + lin(208.0, gl, 45.0, c16) * w * q * q
        + lin(312.0, gl, 69.0, c16) * q
        + lin(3744.0, gl, 810.0, c16) * w * q * q;
    let c_u_second = (gl * w * q).scale(384.0) + (c16 * q).scale(69.0) + lin(3952.0, gl, 855.0, c16) * w * q * q;
    let final_bound = at.final_shape().scale(D3_EXACT as f64);
    push("C_u <= first collected form", c_u_def, c_u_first);
    push(
        "first collected form <= 384 g W Q + 69 C16 Q + (3952 g + 855 C16) W Q^2",
        c_u_first,
        c_u_second,
    );
    push("... <= 39512073856 g E W P Q^2", c_u_second, final_bound);
    push("39512073856 <= 1e11", ls(D3_EXACT as f64), ls(D3_ROUNDED));
    Ok(links)
}

const UNIT_ATOMS: [Atom; 8] = [
    Atom::unit("g"),
    Atom::unit("E"),
    Atom::unit("P"),
    Atom::unit("W"),
    Atom::unit("Q"),
    Atom::unit("C16"),
    Atom::unit("V"),
    Atom::free("I"),
];

fn atom(name: &'static str) -> Posynomial {
    Posynomial::atom(name)
}

fn int(n: i64) -> Posynomial {
    Posynomial::int(n)
}

fn term(c: i64, powers: &[(&'static str, i32)]) -> Posynomial {
    Posynomial::monomial(integer(c), powers)
}

fn dominate(p: &Posynomial, targets: &[Monomial]) -> Result<Posynomial> {
    p.dominate_into(targets, &UNIT_ATOMS)
}

/// Replays every aggregation step exactly.
///
/// Atoms: `g`, `E`, `P`, `W`, `Q`, `C16` and `V = e^{l/4}` are at least 1;
/// `I = 1/l` is free. Transcendental constants are replaced by rational
/// bounds (`e <= 27183/10000`, `pi >= 31415/10000`, `1/log 2 <= 2`) and the
/// analytic facts `V <= W`, `1/mu <= Q`, `1/l <= Q/2` and
/// `c^{3/4}/log c <= W Q` by substitution.
pub fn replay_constants() -> Result<Replay> {
    let mut steps = Vec::new();
    let mut push = |name, computed: Posynomial, displayed: Posynomial| {
        steps.push(ReplayStep {
            name,
            computed,
            displayed,
        });
    };
    let g = atom("g");
    let e_up = rational(27_183, 10_000);

    push("A", term(4, &[("g", 1)]).add(&int(-2)), term(4, &[("g", 1)]));

    let c1 = Posynomial::constant(e_up.clone() * integer(2) - integer(2));
    push("C1", c1, int(4));

    // (8480^2 e / (2 pi)) vs 5578^2, with e and pi bounded by rationals
    let pi_low = rational(31_415, 10_000);
    let c10_sq = integer(8480 * 8480) * e_up / (integer(2) * pi_low);
    push("C10 squared", Posynomial::constant(c10_sq), int(5578 * 5578));

    let b = term(1, &[("E", 1)]).scale(&rational(1, 2));
    let c_def = g.add(&int(-1)).add(&b.scale(&integer(745))).scale(&integer(3));
    let c_big = term(3, &[("g", 1)]).add(&term(1118, &[("E", 1)]));
    push("C", c_def, c_big.clone());

    let a = term(4, &[("g", 1)]);
    let p = atom("P");
    let c12_def = a
        .add(&int(-1))
        .mul(&int(1 + 3 * 4).add(&p.scale(&integer(2 * (1 + 4)))))
        .add(&int(2 * 4 + 2));
    let c12_first = a.mul(&int(13).add(&p.scale(&integer(10)))).add(&int(10));
    push("C12 expanded", c12_def, c12_first.clone());
    let gp = mono(&[("g", 1), ("P", 1)]);
    let c12_second = dominate(&c12_first, &[mono(&[]), gp.clone()])?;
    push(
        "C12 collected",
        c12_second.clone(),
        term(92, &[("g", 1), ("P", 1)]).add(&int(10)),
    );
    let c12 = term(102, &[("g", 1), ("P", 1)]);
    push("C12", dominate(&c12_second, std::slice::from_ref(&gp))?, c12.clone());

    let c13_def = c_big.scale(&rational(41 * 5578, 6));
    let c13 = term(114_349, &[("g", 1)]).add(&term(42_614_061, &[("E", 1)]));
    push("C13", c13_def, c13.clone());

    let c16_def = c12.add(&c13).add(&g.add(&int(-1)).scale(&integer(6 * 5578)));
    let c16_first = dominate(&c16_def.drop_negative(), &[gp.clone(), mono(&[("E", 1)])])?;
    let c16_first_displayed = term(147_919, &[("g", 1), ("P", 1)]).add(&term(42_614_061, &[("E", 1)]));
    push("C16 collected", c16_first, c16_first_displayed.clone());
    let c16_bound = term(42_761_980, &[("g", 1), ("E", 1), ("P", 1)]);
    push(
        "C16",
        dominate(&c16_first_displayed, &[mono(&[("g", 1), ("E", 1), ("P", 1)])])?,
        c16_bound.clone(),
    );

    let c16 = atom("C16");
    let a = term(4, &[("g", 1)]);
    let c17 = a.scale(&integer(4)).add(&c16.scale(&integer(4)));
    push("C17", c17.clone(), term(16, &[("g", 1)]).add(&term(4, &[("C16", 1)])));
    let c18 = a.scale(&integer(4)).add(&c16.scale(&integer(5)));
    push("C18", c18.clone(), term(16, &[("g", 1)]).add(&term(5, &[("C16", 1)])));

    let q = atom("Q");
    let jump = a.scale(&integer(8)).add(&c18.scale(&integer(4)));
    let gq = mono(&[("g", 1), ("Q", 1)]);
    let c16q = mono(&[("C16", 1), ("Q", 1)]);
    let c19_def = c18.add(&jump.mul(&q));
    let c19 = term(112, &[("g", 1), ("Q", 1)]).add(&term(25, &[("C16", 1), ("Q", 1)]));
    push("C19", dominate(&c19_def, &[gq.clone(), c16q.clone()])?, c19.clone());

    // 1/mu <= Q
    let c20_def = c19.add(&jump.mul(&atom("M"))).substitute("M", &q)?;
    let c20 = term(208, &[("g", 1), ("Q", 1)]).add(&term(45, &[("C16", 1), ("Q", 1)]));
    push("C20", c20_def, c20.clone());

    // |c - 2|/log 2 + 2|2 - sqrt c|/log c <= (W + 2) L + 2 (V + 2) (2 I)
    let w = atom("W");
    let c21_def = w
        .add(&int(2))
        .mul(&atom("L"))
        .add(&atom("V").add(&int(2)).mul(&atom("I")).scale(&integer(4)));
    let c21_sub = c21_def.substitute("L", &int(2))?.substitute("V", &w)?;
    let wi = mono(&[("W", 1), ("I", 1)]);
    let c21_first = term(6, &[("W", 1)]).add(&term(12, &[("W", 1), ("I", 1)]));
    push(
        "C21 collected",
        dominate(&c21_sub, &[mono(&[("W", 1)]), wi])?,
        c21_first,
    );
    let c21_second = term(12, &[("W", 1)]).add(&term(12, &[("W", 1), ("I", 1)]));
    let c21_sub = c21_second.substitute("I", &q.scale(&rational(1, 2)))?;
    let c21 = term(18, &[("W", 1), ("Q", 1)]);
    push("C21", dominate(&c21_sub, &[mono(&[("W", 1), ("Q", 1)])])?, c21.clone());

    // C_u = C21 A + C20 (c^{3/4}/log c) + C20 (1 + C22) + 3/4 C20 C21
    // with c^{3/4}/log c <= W Q and C22 <= 1/2
    let c_u_def = c21
        .mul(&a)
        .add(&c20.mul(&w).mul(&q))
        .add(&c20.scale(&rational(3, 2)))
        .add(&c20.mul(&c21).scale(&rational(3, 4)));
    let wq2 = |coef_g: i64, coef_c: i64| {
        term(coef_g, &[("g", 1), ("W", 1), ("Q", 2)]).add(&term(coef_c, &[("C16", 1), ("W", 1), ("Q", 2)]))
    };
    let c_u_first = term(72, &[("g", 1), ("W", 1), ("Q", 1)])
        .add(&wq2(208, 45))
        .add(&term(312, &[("g", 1), ("Q", 1)]))
        .add(&term(69, &[("C16", 1), ("Q", 1)]))
        .add(&wq2(3744, 810));
    push("C_u expanded", c_u_def, c_u_first.clone());
    let c_u_targets = [
        mono(&[("g", 1), ("W", 1), ("Q", 1)]),
        c16q,
        mono(&[("g", 1), ("W", 1), ("Q", 2)]),
        mono(&[("C16", 1), ("W", 1), ("Q", 2)]),
    ];
    let c_u_second = term(384, &[("g", 1), ("W", 1), ("Q", 1)])
        .add(&term(69, &[("C16", 1), ("Q", 1)]))
        .add(&wq2(3952, 855));
    push("C_u collected", dominate(&c_u_first, &c_u_targets)?, c_u_second.clone());
    let shape = mono(&[("g", 1), ("E", 1), ("W", 1), ("P", 1), ("Q", 2)]);
    let c_u_final = dominate(&c_u_second.substitute("C16", &c16_bound)?, std::slice::from_ref(&shape))?;
    push(
        "C_u",
        c_u_final,
        Posynomial::monomial(integer(D3_EXACT), &[("g", 1), ("E", 1), ("W", 1), ("P", 1), ("Q", 2)]),
    );
    push(
        "D3",
        int(D3_EXACT),
        Posynomial::constant(BigRational::from_integer(BigInt::from(100_000_000_000i64))),
    );
    Ok(Replay { steps })
}
