/// Binomial coefficient `C(n, k)`; zero when `k > n`. Saturates at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        let num = (n - i) as u128;
        let den = (i + 1) as u128;
        let g = gcd(acc, den);
        let (a, d) = (acc / g, den / g);
        let num = num / d;
        acc = match a.checked_mul(num) {
            Some(v) => v,
            None => return u128::MAX,
        };
    }
    acc
}

pub fn factorial(k: usize) -> usize {
    (1..=k).product()
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binomials() {
        assert_eq!(binomial(5, 3), 10);
        assert_eq!(binomial(7, 3), 35);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(50, 6), 15_890_700);
        assert_eq!(binomial(100_000, 6), 1_388_680_567_360_798_614_916_650_000);
    }

    #[test]
    fn pascal_rule() {
        for n in 1..60u64 {
            for k in 1..=n {
                assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
            }
        }
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), 1);
        assert_eq!(factorial(6), 720);
        assert_eq!(factorial(8), 40320);
    }
}
