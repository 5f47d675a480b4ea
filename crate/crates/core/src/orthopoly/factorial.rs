use crate::scalar::Scalar;

/// Falling factorial `a (a-1) ... (a-k+1)`, equal to 1 for `k = 0`.
pub fn falling_factorial<T: Scalar>(a: T, k: u32) -> T {
    let mut acc = T::one();
    let mut term = a;
    for _ in 0..k {
        acc = acc * term.clone();
        term = term - T::one();
    }
    acc
}

/// Rising factorial (Pochhammer symbol) `a (a+1) ... (a+k-1)`, equal to 1 for `k = 0`.
pub fn rising_factorial<T: Scalar>(a: T, k: u32) -> T {
    let mut acc = T::one();
    let mut term = a;
    for _ in 0..k {
        acc = acc * term.clone();
        term = term + T::one();
    }
    acc
}

/// `n!` as a scalar.
pub fn factorial<T: Scalar>(n: u32) -> T {
    rising_factorial(T::one(), n)
}
