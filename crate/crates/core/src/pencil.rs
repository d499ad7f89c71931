//! The family `y^2 = (x - s) Q(x)` and its per-fiber invariants.

use crate::arith::{
    discriminant, factorize, rational_height, resultant, BigInt, BigRational, FactorError,
    Factorization, PolyError, RatPoly,
};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PencilError {
    #[error("Q must have degree at least 4 (got {0:?}); the fibers would have genus below 2")]
    GenusTooSmall(Option<usize>),
    #[error("Q is not squarefree")]
    NotSquarefree,
    #[error("fiber denominator must be positive, got {0}")]
    BadDenominator(BigInt),
    #[error("degenerate fiber: Q({0}) = 0")]
    DegenerateFiber(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A validated pencil: squarefree `Q` of degree `d - 1 >= 4`.
#[derive(Debug, Clone)]
pub struct PencilSpec {
    q_poly: RatPoly,
    q: BigInt,
    degree: usize,
    genus: usize,
    disc_q: BigRational,
    roots: Vec<BigRational>,
    int_poly: Vec<BigInt>,
    linear_forms: Vec<(BigInt, BigInt)>,
    cofactor: Vec<BigInt>,
}

/// Genus of `y^2 = f(x)` for squarefree `f` of degree `d`.
pub fn genus_for_degree(d: usize) -> usize {
    if d % 2 == 0 {
        (d - 2) / 2
    } else {
        (d - 1) / 2
    }
}

impl PencilSpec {
    pub fn new(q_poly: RatPoly) -> Result<Self, PencilError> {
        let deg_q = q_poly.degree().filter(|&d| d >= 4).ok_or(PencilError::GenusTooSmall(q_poly.degree()))?;
        if !q_poly.is_squarefree() {
            return Err(PencilError::NotSquarefree);
        }
        let degree = deg_q + 1;
        let q = q_poly.denominator_lcm();
        let disc_q = discriminant(&q_poly)?;
        let roots = q_poly.rational_roots()?;
        let int_poly = q_poly.cleared();

        // qQ = prod (m_i x - n_i) * T(x) with T integral (Gauss's lemma).
        let mut linear_forms = Vec::with_capacity(roots.len());
        let mut rest = RatPoly::new(int_poly.iter().cloned().map(BigRational::from_integer).collect());
        for r in &roots {
            let (m, n) = (r.denom().clone(), r.numer().clone());
            let lin = RatPoly::new(vec![BigRational::from_integer(-&n), BigRational::from_integer(m.clone())]);
            let (quo, rem) = rest.div_rem(&lin)?;
            if !rem.is_zero() {
                return Err(PencilError::Internal("rational root does not divide Q".into()));
            }
            rest = quo;
            linear_forms.push((m, n));
        }
        let cofactor = rest
            .coeffs()
            .iter()
            .map(|c| {
                c.is_integer()
                    .then(|| c.to_integer())
                    .ok_or_else(|| PencilError::Internal("non-integral cofactor after removing linear factors".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;

        Ok(PencilSpec {
            genus: genus_for_degree(degree),
            q_poly,
            q,
            degree,
            disc_q,
            roots,
            int_poly,
            linear_forms,
            cofactor,
        })
    }

    /// `Q = x(x-2)(x-6)(x-8)(x-12)(x-20)`, the worked sextic example.
    pub fn sextic_example() -> Self {
        let roots: Vec<_> = [0i64, 2, 6, 8, 12, 20].iter().map(|&r| BigRational::from_integer(r.into())).collect();
        PencilSpec::new(RatPoly::from_roots(&roots)).expect("sextic example is a valid pencil")
    }

    pub fn q_poly(&self) -> &RatPoly {
        &self.q_poly
    }

    /// Smallest positive `q` with `qQ` integral.
    pub fn q(&self) -> &BigInt {
        &self.q
    }

    /// Degree `d` of `(x - s)Q(x)`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn disc_q(&self) -> &BigRational {
        &self.disc_q
    }

    /// Distinct rational roots of `Q`, ascending.
    pub fn rational_roots(&self) -> &[BigRational] {
        &self.roots
    }

    /// True when `Q` has `deg Q` distinct rational roots.
    pub fn splits_over_q(&self) -> bool {
        self.roots.len() == self.degree - 1
    }

    /// Coefficients of `qQ`, lowest degree first.
    pub fn integer_poly(&self) -> &[BigInt] {
        &self.int_poly
    }

    /// `(m, n)` per rational root `n/m` of `Q`.
    pub fn linear_forms(&self) -> &[(BigInt, BigInt)] {
        &self.linear_forms
    }

    /// `disc(qQ) = q^(2d-4) disc(Q)`, always an integer.
    pub fn integer_disc_q(&self) -> BigInt {
        let scaled = &self.disc_q * BigRational::from_integer(num_traits::pow(self.q.clone(), 2 * self.degree - 4));
        debug_assert!(scaled.is_integer());
        scaled.to_integer()
    }
}

/// A non-degenerate rational parameter `s = a/b` in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiberParams {
    a: BigInt,
    b: BigInt,
    h_star: BigInt,
}

impl FiberParams {
    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    /// `H*(s) = max{3, |a|, b}`.
    pub fn h_star(&self) -> &BigInt {
        &self.h_star
    }

    pub fn s(&self) -> BigRational {
        BigRational::new(self.a.clone(), self.b.clone())
    }
}

pub fn new_pencil(q_poly: RatPoly) -> Result<PencilSpec, PencilError> {
    PencilSpec::new(q_poly)
}

pub fn fiber_params(spec: &PencilSpec, a: &BigInt, b: &BigInt) -> Result<FiberParams, PencilError> {
    if !b.is_positive() {
        return Err(PencilError::BadDenominator(b.clone()));
    }
    let g = a.gcd(b);
    let (a, b) = (a / &g, b / &g);
    let s = BigRational::new(a.clone(), b.clone());
    if spec.q_poly.eval(&s).is_zero() {
        return Err(PencilError::DegenerateFiber(crate::arith::Compact(&s).to_string()));
    }
    let h_star = rational_height(&s).max(BigInt::from(3));
    Ok(FiberParams { a, b, h_star })
}

pub fn fiber_params_from_rational(spec: &PencilSpec, s: &BigRational) -> Result<FiberParams, PencilError> {
    fiber_params(spec, s.numer(), s.denom())
}

/// `(x - s) Q(x)`
pub fn fiber_poly(spec: &PencilSpec, fp: &FiberParams) -> RatPoly {
    &RatPoly::linear(&fp.s()) * &spec.q_poly
}

/// `Delta(s) = disc(Q) Q(s)^2`, the discriminant of `(x - s)Q(x)`.
pub fn delta(spec: &PencilSpec, fp: &FiberParams) -> BigRational {
    let qs = spec.q_poly.eval(&fp.s());
    &spec.disc_q * &qs * &qs
}

/// Discriminant of the fiber polynomial through the resultant; independent of [`delta`].
pub fn delta_via_resultant(spec: &PencilSpec, fp: &FiberParams) -> Result<BigRational, PencilError> {
    Ok(discriminant(&fiber_poly(spec, fp))?)
}

/// `(bq)^(2d-2) Delta(s)`, which is always an integer.
pub fn integral_disc(spec: &PencilSpec, fp: &FiberParams) -> Result<BigInt, PencilError> {
    let scale = num_traits::pow(&fp.b * &spec.q, 2 * spec.degree - 2);
    let value = delta(spec, fp) * BigRational::from_integer(scale);
    if !value.is_integer() {
        return Err(PencilError::Internal(format!(
            "(bq)^(2d-2) Delta(s) = {value} is not an integer"
        )));
    }
    Ok(value.to_integer())
}

/// `b^(d-1) qQ(a/b) = prod (m_i a - n_i b) * T_h(a, b)`, split into its integer pieces.
///
/// The integral discriminant equals `disc(qQ) * (prod pieces)^2`, which lets
/// callers factor small pieces instead of one large integer.
pub fn homogenized_q_pieces(spec: &PencilSpec, fp: &FiberParams) -> Vec<BigInt> {
    let mut pieces: Vec<BigInt> = spec
        .linear_forms
        .iter()
        .map(|(m, n)| m * &fp.a - n * &fp.b)
        .collect();
    let deg_t = spec.cofactor.len() - 1;
    if deg_t > 0 || !spec.cofactor[0].is_one() {
        // T_h(a, b) = sum t_i a^i b^(deg_t - i)
        let value = spec
            .cofactor
            .iter()
            .enumerate()
            .map(|(i, c)| c * num_traits::pow(fp.a.clone(), i) * num_traits::pow(fp.b.clone(), deg_t - i))
            .sum();
        pieces.push(value);
    }
    pieces
}

/// Factorization of `|(bq)^(2d-2) Delta(s)|` assembled from the pieces of
/// [`homogenized_q_pieces`] and `disc(qQ)`.
pub fn integral_disc_factorization(spec: &PencilSpec, fp: &FiberParams) -> Result<Factorization, FactorError> {
    let mut acc = factor_abs(&spec.integer_disc_q())?;
    for piece in homogenized_q_pieces(spec, fp) {
        acc = acc.merge(&factor_abs(&piece)?.pow(2));
    }
    Ok(acc)
}

fn factor_abs(n: &BigInt) -> Result<Factorization, FactorError> {
    factorize(&n.abs())
}

/// Resultant-based cross-check of `disc((x - s)Q) = disc(Q) Q(s)^2` via the
/// product formula `disc(fg) = disc(f) disc(g) Res(f, g)^2`.
pub fn delta_via_product_formula(spec: &PencilSpec, fp: &FiberParams) -> Result<BigRational, PencilError> {
    let lin = RatPoly::linear(&fp.s());
    let res = resultant(&lin, &spec.q_poly)?;
    Ok(&spec.disc_q * &res * &res)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn quartic() -> PencilSpec {
        new_pencil(RatPoly::from_i64s(&[-1, 0, 0, 0, 1])).unwrap()
    }

    #[test]
    fn genus_and_denominators() {
        let spec = PencilSpec::sextic_example();
        assert_eq!((spec.degree(), spec.genus(), spec.q().clone()), (7, 3, BigInt::one()));
        let spec = quartic();
        assert_eq!((spec.degree(), spec.genus(), spec.q().clone()), (5, 2, BigInt::one()));
        assert!(matches!(new_pencil(RatPoly::from_i64s(&[0, 0, 1])), Err(PencilError::GenusTooSmall(Some(2)))));
        let square = &RatPoly::from_i64s(&[-1, 0, 1]) * &RatPoly::from_i64s(&[-1, 0, 1]);
        assert!(matches!(new_pencil(&square * &RatPoly::from_i64s(&[0, 1])), Err(PencilError::NotSquarefree)));
        let halves = RatPoly::new(vec![q(1, 2), q(0, 1), q(0, 1), q(1, 3), q(0, 1), q(1, 1)]);
        let spec = new_pencil(halves).unwrap();
        assert_eq!(spec.q(), &BigInt::from(6));
        assert_eq!((spec.degree(), spec.genus()), (6, 2));
    }

    #[test]
    fn fiber_parameters() {
        let spec = PencilSpec::sextic_example();
        let fp = fiber_params(&spec, &1.into(), &1.into()).unwrap();
        assert_eq!(fp.h_star(), &BigInt::from(3));
        let fp = fiber_params(&spec, &3.into(), &2.into()).unwrap();
        assert_eq!(fp.h_star(), &BigInt::from(3));
        let fp = fiber_params(&spec, &(-14).into(), &4.into()).unwrap();
        assert_eq!((fp.a().clone(), fp.b().clone()), (BigInt::from(-7), BigInt::from(2)));
        assert_eq!(fp.h_star(), &BigInt::from(7));
        assert!(matches!(fiber_params(&spec, &2.into(), &1.into()), Err(PencilError::DegenerateFiber(_))));
        assert!(matches!(fiber_params(&spec, &1.into(), &0.into()), Err(PencilError::BadDenominator(_))));
    }

    #[test]
    fn fiber_polynomials() {
        let spec = quartic();
        let fp = fiber_params(&spec, &0.into(), &1.into()).unwrap();
        assert_eq!(fiber_poly(&spec, &fp), RatPoly::from_i64s(&[0, -1, 0, 0, 0, 1]));
        let fp = fiber_params(&spec, &1.into(), &2.into()).unwrap();
        let expected = RatPoly::new(vec![q(1, 2), q(-1, 1), q(0, 1), q(0, 1), q(-1, 2), q(1, 1)]);
        assert_eq!(fiber_poly(&spec, &fp), expected);
    }

    /// prod_{i<j} (r_i - r_j)^2 over explicit roots.
    fn root_product_oracle(roots: &[BigRational]) -> BigRational {
        let mut acc = BigRational::one();
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                let d = &roots[i] - &roots[j];
                acc *= &d * &d;
            }
        }
        acc
    }

    #[test]
    fn delta_has_squared_factor_at_twelve() {
        let spec = PencilSpec::sextic_example();
        let constant = BigRational::from_integer(
            BigInt::from(2).pow(48u32) * BigInt::from(3).pow(14u32) * BigInt::from(5).pow(4u32) * BigInt::from(7).pow(2u32),
        );
        assert_eq!(spec.disc_q(), &constant);
        for s in [q(1, 1), q(3, 1), q(-5, 7), q(41, 3), q(13, 1)] {
            let fp = fiber_params_from_rational(&spec, &s).unwrap();
            let mut roots = vec![s.clone()];
            roots.extend([0, 2, 6, 8, 12, 20].iter().map(|&r| q(r, 1)));
            let oracle = root_product_oracle(&roots);
            let squared_form = [0, 2, 6, 8, 12, 20]
                .iter()
                .fold(constant.clone(), |acc, &r| {
                    let f = &s - q(r, 1);
                    acc * &f * &f
                });
            assert_eq!(delta(&spec, &fp), oracle);
            assert_eq!(delta(&spec, &fp), squared_form);
            assert_eq!(delta_via_resultant(&spec, &fp).unwrap(), oracle);
            // the single-power (s - 12) form differs whenever s != 13, 11
            let single = &squared_form / (&s - q(12, 1));
            if s != q(13, 1) {
                assert_ne!(delta(&spec, &fp), single);
            }
        }
    }

    #[test]
    fn delta_paths_agree_on_quartic() {
        let spec = quartic();
        let fp = fiber_params(&spec, &1.into(), &2.into()).unwrap();
        assert_eq!(delta(&spec, &fp), delta_via_resultant(&spec, &fp).unwrap());
        assert_eq!(delta(&spec, &fp), delta_via_product_formula(&spec, &fp).unwrap());
    }

    #[test]
    fn integral_discriminant() {
        let spec = PencilSpec::sextic_example();
        let fp = fiber_params(&spec, &1.into(), &1.into()).unwrap();
        let expected = spec.disc_q().to_integer() * BigInt::from(25 * 49 * 121 * 361);
        assert_eq!(integral_disc(&spec, &fp).unwrap(), expected);
        assert_eq!(BigRational::from_integer(integral_disc(&spec, &fp).unwrap()), delta(&spec, &fp));

        let spec = quartic();
        let fp = fiber_params(&spec, &1.into(), &2.into()).unwrap();
        let value = integral_disc(&spec, &fp).unwrap();
        assert_eq!(BigRational::from_integer(value), delta(&spec, &fp) * q(256, 1));
    }

    #[test]
    fn pieces_reassemble_integral_disc() {
        let halves = RatPoly::new(vec![q(1, 2), q(-3, 1), q(0, 1), q(1, 3), q(0, 1), q(5, 4)]);
        let mut with_roots = &halves * &RatPoly::from_roots(&[q(2, 3), q(-1, 1)]);
        with_roots = with_roots.scale(&q(7, 5));
        for poly in [halves, with_roots, PencilSpec::sextic_example().q_poly().clone()] {
            let spec = new_pencil(poly).unwrap();
            for (a, b) in [(1, 1), (-3, 7), (22, 5), (101, 3)] {
                let Ok(fp) = fiber_params(&spec, &a.into(), &b.into()) else { continue };
                let prod: BigInt = homogenized_q_pieces(&spec, &fp).iter().product();
                let assembled = spec.integer_disc_q() * &prod * &prod;
                assert_eq!(assembled, integral_disc(&spec, &fp).unwrap());
                let fact = integral_disc_factorization(&spec, &fp).unwrap();
                assert_eq!(fact.value(), &assembled.abs());
            }
        }
    }
}
