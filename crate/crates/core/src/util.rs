/// Fixed 17-significant-digit scientific notation, locale independent.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Order-independent compensated sum: terms are sorted first, so any
/// permutation of the same multiset gives a bit-identical result.
pub(crate) fn symmetric_sum(terms: &mut [f64]) -> f64 {
    terms.sort_by(f64::total_cmp);
    let mut sum = 0.0;
    let mut carry = 0.0;
    for &x in terms.iter() {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// SplitMix64 step; derives independent seeds from a master seed.
pub(crate) fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_sum_is_permutation_invariant() {
        let mut a = [1e16, 1.0, -1e16, 3.5, 1e-3];
        let mut b = [3.5, -1e16, 1e-3, 1.0, 1e16];
        assert_eq!(symmetric_sum(&mut a).to_bits(), symmetric_sum(&mut b).to_bits());
        assert!((symmetric_sum(&mut [0.1; 10]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn formatting_has_seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.0), "-2.0000000000000000e0");
    }
}
