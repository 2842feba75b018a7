use crate::scalar::Scalar;

/// Inverts the row-major `m x m` matrix `a` by Gauss-Jordan elimination with
/// partial pivoting. Returns `None` when a pivot falls below `tol`.
pub(crate) fn invert<T: Scalar>(mut a: Vec<T>, m: usize, tol: T) -> Option<Vec<T>> {
    debug_assert_eq!(a.len(), m * m);
    let mut inv = vec![T::zero(); m * m];
    for i in 0..m {
        inv[i * m + i] = T::one();
    }
    for col in 0..m {
        let pivot_row = (col..m).max_by(|&r, &s| {
            a[r * m + col]
                .abs()
                .partial_cmp(&a[s * m + col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
                // prefer the lowest row on ties
                .then(s.cmp(&r))
        })?;
        let pivot = a[pivot_row * m + col];
        if !(pivot.abs() > tol) {
            return None;
        }
        if pivot_row != col {
            for k in 0..m {
                a.swap(pivot_row * m + k, col * m + k);
                inv.swap(pivot_row * m + k, col * m + k);
            }
        }
        let scale = T::one() / pivot;
        for k in 0..m {
            a[col * m + k] *= scale;
            inv[col * m + k] *= scale;
        }
        for r in 0..m {
            if r == col {
                continue;
            }
            let f = a[r * m + col];
            if f == T::zero() {
                continue;
            }
            for k in 0..m {
                let ak = a[col * m + k];
                let ik = inv[col * m + k];
                a[r * m + k] -= f * ak;
                inv[r * m + k] -= f * ik;
            }
        }
    }
    Some(inv)
}
