//! Adaptive summation of infinite series of exact terms.
//!
//! Termination relies on the term valuations eventually exceeding the
//! requested order; this is checked dynamically rather than assumed. A run
//! of `stop_streak` consecutive terms contributing nothing below the order
//! ends the sum, and `max_terms` converts a divergent parameter choice into
//! a clean error.

use crate::error::{Error, Result};

use super::series::{Order, QSeries};

#[derive(Clone, Debug)]
pub struct SumConfig {
    pub stop_streak: u32,
    pub max_terms: u64,
}

impl Default for SumConfig {
    fn default() -> Self {
        SumConfig { stop_streak: 3, max_terms: 100_000 }
    }
}

/// Sum `term(start) + term(start+1) + ⋯` of all contributions below `order`.
pub fn adaptive_sum<F>(mut term: F, start: i64, order: i64, cfg: &SumConfig) -> Result<QSeries>
where
    F: FnMut(i64) -> Result<QSeries>,
{
    let mut acc = QSeries::zero();
    let mut streak = 0u32;
    let mut n = start;
    let mut consumed = 0u64;
    loop {
        if consumed >= cfg.max_terms {
            return Err(Error::NonConvergent(format!(
                "sum consumed {} terms without sustained valuation growth past order {}",
                cfg.max_terms, order
            )));
        }
        let t = term(n)?;
        consumed += 1;
        // A term whose valuation floor reaches the order contributes nothing
        // in the tracked window.  None means the exact zero series.
        let skippable = match t.val_floor() {
            Some(v) => v >= order,
            None => true,
        };
        if skippable {
            streak += 1;
            if streak >= cfg.stop_streak {
                break;
            }
        } else {
            streak = 0;
            acc = acc.add(&t.truncated(Order::Finite(order)));
        }
        n += 1;
    }
    Ok(acc.truncated(Order::Finite(order)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::coeff::Coefficient;
    use crate::qseries::monomial::QMonomial;
    use crate::qseries::poch::one_minus_inv;

    fn c(n: i64) -> Coefficient {
        Coefficient::from_int(n)
    }

    /// Independent divisor-count oracle for the Lambert series
    /// sum_n q^n/(1-q^n) = sum_m d(m) q^m.
    fn divisor_counts(n: i64) -> Vec<Coefficient> {
        let mut d = vec![0i64; n as usize];
        for a in 1..n {
            let mut m = a;
            while m < n {
                d[m as usize] += 1;
                m += a;
            }
        }
        d.into_iter().map(c).collect()
    }

    fn lambert_term(n: i64, order: i64) -> crate::error::Result<QSeries> {
        let m = QMonomial::q_power(n);
        Ok(one_minus_inv(&m, order)?.scale_mono(&m))
    }

    #[test]
    fn divisor_window_small() {
        let s = adaptive_sum(|n| lambert_term(n, 5), 1, 5, &SumConfig::default()).unwrap();
        let expect = vec![c(0), c(1), c(2), c(2), c(3)];
        assert_eq!(s.coeff_window(0, 5).unwrap(), expect);
    }

    #[test]
    fn divisor_oracle_to_200() {
        let n = 200;
        let s = adaptive_sum(|k| lambert_term(k, n), 1, n, &SumConfig::default()).unwrap();
        assert_eq!(s.coeff_window(0, n).unwrap(), divisor_counts(n));
    }

    #[test]
    fn all_terms_beyond_order() {
        let s = adaptive_sum(
            |n| {
                if n == 1 {
                    Ok(QSeries::zero())
                } else {
                    Ok(QSeries::q_power(n + 20))
                }
            },
            1,
            10,
            &SumConfig::default(),
        )
        .unwrap();
        assert!(s.is_zero_window());
        assert_eq!(s.order(), Order::Finite(10));
    }

    #[test]
    fn signed_triangular_sum_matches_partial_oracle() {
        // sum_n (-1)^n q^{n(n+1)/2}/(1-q^n) at order 6, against brute-force
        // partial sums of the same rational terms computed independently.
        let order = 6;
        let term = |n: i64| -> crate::error::Result<QSeries> {
            let tri = QMonomial::q_power(n * (n + 1) / 2);
            let sign = if n % 2 == 0 { c(1) } else { c(-1) };
            Ok(one_minus_inv(&QMonomial::q_power(n), order)?
                .scale_mono(&tri)
                .scale_coeff(&sign))
        };
        let s = adaptive_sum(term, 1, order, &SumConfig::default()).unwrap();
        // Oracle: expand each 1/(1-q^n) as a plain geometric series by hand.
        let mut expect = vec![c(0); order as usize];
        for n in 1..=order {
            let tri = n * (n + 1) / 2;
            if tri >= order {
                break;
            }
            let mut e = tri;
            while e < order {
                let cur = expect[e as usize].clone();
                let inc = if n % 2 == 0 { c(1) } else { c(-1) };
                expect[e as usize] = &cur + &inc;
                e += n;
            }
        }
        assert_eq!(s.coeff_window(0, order).unwrap(), expect);
        // Frozen values for the window [0, 4): -q - q^2 + 0q^3.
        assert_eq!(s.coeff(1), c(-1));
        assert_eq!(s.coeff(2), c(-1));
        assert_eq!(s.coeff(3), c(0));
    }

    #[test]
    fn stagnating_valuation_errors() {
        let cfg = SumConfig { stop_streak: 3, max_terms: 500 };
        let r = adaptive_sum(|_| Ok(QSeries::one()), 1, 10, &cfg);
        assert!(matches!(r, Err(Error::NonConvergent(_))));
    }
}
