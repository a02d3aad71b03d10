//! Exact table of the recursive piercing bounds ε̄_i^d and the quantities
//! derived from it (approximation factors, crossovers, winning thresholds).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Result, VgError};

/// Exact rational, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Formats as `num/den`, or just `num` for integers.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `num/den`, a plain integer, or a finite decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || VgError::InvalidInput(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let d = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(n, d);
    Ok(if neg { -r } else { r })
}

/// JSON form `{num, den}`. Components that fit in an i64 are plain numbers,
/// larger ones are decimal strings so that no precision is lost.
#[derive(Clone, Debug, PartialEq)]
pub struct JsonRational(pub Rational);

impl Serialize for JsonRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Rational", 2)?;
        let num = self.0.numer();
        let den = self.0.denom();
        match (num.to_i64(), den.to_i64()) {
            (Some(n), Some(d)) => {
                st.serialize_field("num", &n)?;
                st.serialize_field("den", &d)?;
            }
            _ => {
                st.serialize_field("num", &num.to_string())?;
                st.serialize_field("den", &den.to_string())?;
            }
        }
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub value: Rational,
    pub r: usize,
    pub s: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonTable {
    pub dim: usize,
    pub entries: Vec<Entry>,
}

impl EpsilonTable {
    pub fn kmax(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn value(&self, i: usize) -> Result<&Rational> {
        self.entries
            .get(i)
            .map(|e| &e.value)
            .ok_or_else(|| VgError::OutOfRange(format!("index {i} beyond table size {}", self.kmax())))
    }

    pub fn entry(&self, i: usize) -> Result<&Entry> {
        self.entries
            .get(i)
            .ok_or_else(|| VgError::OutOfRange(format!("index {i} beyond table size {}", self.kmax())))
    }
}

/// Runs the recursion
/// ε̄_0 = 1, ε̄_i = min_{r + 2s + 1 = i} v / (1 + v) with v = ε̄_r (1 + (d-1) ε̄_s).
/// One point, one subproblem of size `r` and two of size `s`, in every
/// dimension. The argmin with the smallest `r` is stored.
pub fn build_table(d: usize, kmax: i64) -> Result<EpsilonTable> {
    if d != 2 && d != 3 {
        return Err(VgError::UnsupportedDimension(d));
    }
    if kmax < 0 {
        return Err(VgError::InvalidInput(format!("kmax must be nonnegative, got {kmax}")));
    }
    let kmax = kmax as usize;
    let one = Rational::one();
    let dm1 = BigInt::from(d - 1);
    let mut entries = vec![Entry { value: one.clone(), r: 0, s: 0 }];
    let mut approx = vec![1.0f64];
    // v/(1 + v) is increasing in v, so minimizing v is enough. Floats pick
    // the near-minimal splits; only those are compared exactly.
    let v_of = |entries: &[Entry], r: usize, s: usize| -> (BigInt, BigInt) {
        let (a, b) = (entries[r].value.numer(), entries[r].value.denom());
        let (c, e) = (entries[s].value.numer(), entries[s].value.denom());
        (a * (e + &dm1 * c), b * e)
    };
    for i in 1..=kmax {
        let smax = (i - 1) / 2;
        // r = i - 1 - 2s, scanned with r ascending.
        let splits: Vec<(usize, usize, f64)> = (0..=smax)
            .rev()
            .map(|s| {
                let r = i - 1 - 2 * s;
                (r, s, approx[r] * (1.0 + (d - 1) as f64 * approx[s]))
            })
            .collect();
        let vmin = splits.iter().map(|t| t.2).fold(f64::INFINITY, f64::min);
        let mut best: Option<(BigInt, BigInt, usize, usize)> = None;
        for &(r, s, vf) in &splits {
            if vf > vmin * (1.0 + 1e-9) {
                continue;
            }
            let (num, den) = v_of(&entries, r, s);
            let better = match &best {
                None => true,
                Some((bn, bd, _, _)) => &num * bd < bn * &den,
            };
            if better {
                best = Some((num, den, r, s));
            }
        }
        let (num, den, r, s) = best.expect("at least one decomposition exists");
        // v/(1 + v) = num/(den + num).
        let value = Rational::new(num.clone(), den + num);
        approx.push(to_f64(&value));
        entries.push(Entry { value, r, s });
    }
    Ok(EpsilonTable { dim: d, entries })
}

/// (2k-1) / (2k (1 - ε̄_k)).
pub fn approx_factor(k: usize, table: &EpsilonTable) -> Result<Rational> {
    if k == 0 {
        return Err(VgError::OutOfRange("k must be at least 1".into()));
    }
    let eps = table.value(k)?;
    let kk = BigInt::from(k);
    let num = Rational::from_integer(BigInt::from(2) * &kk - 1);
    Ok(num / (Rational::from_integer(BigInt::from(2) * kk) * (Rational::one() - eps)))
}

/// (2k-1) / (2(k-κ)), the guarantee of the κ/k net strategies.
pub fn net_factor(k: usize, kappa: usize) -> Result<Rational> {
    if k <= kappa {
        return Err(VgError::OutOfRange(format!("net bound needs k > {kappa}, got k = {k}")));
    }
    Ok(rat(2 * k as i64 - 1, 2 * (k - kappa) as i64))
}

/// Largest k such that the recursive strategy beats the net strategy for
/// every k' in (κ, k].
pub fn crossover_k(d: usize, kappa: usize, table: &EpsilonTable) -> Result<usize> {
    if table.dim != d {
        return Err(VgError::DimensionMismatch { expected: d, got: table.dim });
    }
    for k in kappa + 1..=table.kmax() {
        if approx_factor(k, table)? >= net_factor(k, kappa)? {
            return Ok(k - 1);
        }
    }
    Err(VgError::OutOfRange(format!(
        "table with kmax = {} too short to witness the crossover for kappa = {kappa}",
        table.kmax()
    )))
}

/// Smallest k from which P1 provably wins: ε̄_k^2 < 1/2 in the plane, and
/// (k - 420)/k > 1/2 in space.
pub fn winning_threshold(d: usize, table: &EpsilonTable) -> Result<usize> {
    if table.dim != d {
        return Err(VgError::DimensionMismatch { expected: d, got: table.dim });
    }
    let half = rat(1, 2);
    for k in 1..=table.kmax() {
        let wins = match d {
            2 => table.entries[k].value < half,
            3 => rat(k as i64 - 420, k as i64) > half,
            _ => return Err(VgError::UnsupportedDimension(d)),
        };
        if wins {
            return Ok(k);
        }
    }
    Err(VgError::OutOfRange(format!(
        "table with kmax = {} does not reach the winning threshold",
        table.kmax()
    )))
}

/// `floor(q * n)` for a nonnegative rational q.
pub fn floor_times(q: &Rational, n: usize) -> usize {
    (q * Rational::from_integer(BigInt::from(n))).floor().to_integer().to_usize().unwrap_or(usize::MAX)
}

/// `ceil(q * n)` for a nonnegative rational q.
pub fn ceil_times(q: &Rational, n: usize) -> usize {
    (q * Rational::from_integer(BigInt::from(n))).ceil().to_integer().to_usize().unwrap_or(usize::MAX)
}

pub fn to_f64(q: &Rational) -> f64 {
    let n = q.numer().to_f64().unwrap_or(f64::NAN);
    let d = q.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        // Very long fractions: shift both sides down before dividing.
        let shift = q.denom().bits().saturating_sub(1000);
        let n = (q.numer().abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
        let d = (q.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
        if q.is_negative() {
            -n / d
        } else {
            n / d
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_values() {
        let t = build_table(2, 5).unwrap();
        assert_eq!(t.entries[0].value, rat(1, 1));
        assert_eq!(t.entries[1].value, rat(2, 3));
        assert_eq!(t.entries[2].value, rat(4, 7));
        assert_eq!(t.entries[5].value, rat(20, 41));
        assert_eq!((t.entries[5].r, t.entries[5].s), (2, 1));
        let t3 = build_table(3, 1).unwrap();
        assert_eq!(t3.entries[1].value, rat(3, 4));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(build_table(2, -1).is_err());
        assert!(build_table(4, 3).is_err());
        assert!(net_factor(42, 42).is_err());
        let t = build_table(2, 3).unwrap();
        assert!(approx_factor(4, &t).is_err());
        assert!(winning_threshold(2, &t).is_err());
    }

    #[test]
    fn net_factor_examples() {
        assert_eq!(net_factor(43, 42).unwrap(), rat(85, 2));
        assert_eq!(net_factor(84, 42).unwrap(), rat(167, 84));
        assert_eq!(net_factor(841, 420).unwrap(), rat(1681, 842));
    }

    #[test]
    fn kappa_zero_crossover() {
        let t = build_table(2, 10).unwrap();
        assert_eq!(crossover_k(2, 0, &t).unwrap(), 0);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("2").unwrap(), rat(2, 1));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert_eq!(fmt_rational(&rat(9633, 5740)), "9633/5740");
        assert_eq!(fmt_rational(&rat(4, 2)), "2");
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(floor_times(&rat(4, 7), 70), 40);
        assert_eq!(ceil_times(&rat(1, 3), 10), 4);
        assert_eq!(floor_times(&rat(2, 3), 10), 6);
    }
}
