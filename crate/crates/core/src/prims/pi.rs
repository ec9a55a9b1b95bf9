use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{as_literal, nat_value, Literal, Registry, Signature, NAT, RAT};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::term::{tuple_component, Term};

/// `4 / (1 + ((i - 1/2) / l)^2)` as an exact fraction.
pub fn pi_integrand(i: u64, l: u64) -> BigRational {
    let l2 = BigInt::from(4) * BigInt::from(l) * BigInt::from(l);
    let odd = BigInt::from(2 * i - 1);
    BigRational::new(BigInt::from(4) * &l2, &l2 + &odd * &odd)
}

/// Block `k` (1-based) of `p` equal blocks of `sum_{i=1..l} f((i - 1/2)/l)`.
pub fn pi_partial(k: u64, l: u64, p: u64) -> Result<BigRational> {
    if p == 0 || l == 0 || !l.is_multiple_of(p) {
        return Err(Error::Prim(format!("{p} does not divide {l}")));
    }
    if k == 0 || k > p {
        return Err(Error::Prim(format!("block {k} out of range 1..{p}")));
    }
    let width = l / p;
    let lo = (k - 1) * width + 1;
    let hi = k * width;
    Ok((lo..=hi).map(|i| pi_integrand(i, l)).fold(BigRational::zero(), |acc, x| acc + x))
}

/// `(1/l) sum_{i=1..l} f((i - 1/2)/l)`, summed sequentially.
pub fn pi_oracle(l: u64) -> BigRational {
    let total = (1..=l).map(|i| pi_integrand(i, l)).fold(BigRational::zero(), |acc, x| acc + x);
    total / BigRational::from(BigInt::from(l))
}

pub(super) fn register(r: &mut Registry, p: usize) {
    let nat = Formula::atom(NAT);
    let q = Formula::atom(RAT);
    for k in 1..=p {
        r.register(
            &format!("f{k}"),
            Signature::Fixed(Formula::arrow(nat.clone(), q.clone())),
            1,
            Some(Arc::new(move |args: &[Term]| {
                let Some(l) = nat_value(&args[0]) else {
                    return Ok(None);
                };
                Ok(Some(Term::lit(Literal::Rat(pi_partial(k as u64, l, p as u64)?))))
            })),
        );
    }
    let qs = Formula::conj_all(std::iter::repeat_n(q.clone(), p)).expect("p >= 1");
    r.register(
        "sum",
        Signature::Fixed(Formula::arrow(qs, Formula::arrow(nat, q))),
        2,
        Some(Arc::new(move |args: &[Term]| {
            let Some(l) = nat_value(&args[1]) else {
                return Ok(None);
            };
            if l == 0 {
                return Err(Error::Prim("sum over a zero length".into()));
            }
            let mut total = BigRational::zero();
            for i in 0..p {
                let Ok(item) = tuple_component(&args[0], i, p) else {
                    return Ok(None);
                };
                match as_literal(&item) {
                    Some(Literal::Rat(x)) => total += x,
                    _ => return Ok(None),
                }
            }
            Ok(Some(Term::lit(Literal::Rat(total / BigRational::from(BigInt::from(l))))))
        })),
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_point() {
        assert_eq!(pi_partial(1, 1, 1).unwrap(), BigRational::new(16.into(), 5.into()));
    }

    #[test]
    fn blocks_cover_the_sum() {
        for p in [1, 2, 4, 8] {
            let total = (1..=p).map(|k| pi_partial(k, 8, p).unwrap()).fold(BigRational::zero(), |a, x| a + x);
            assert_eq!(total / BigRational::from(BigInt::from(8)), pi_oracle(8));
        }
        assert!(pi_partial(1, 8, 3).is_err());
    }
}
