//! Small exact matrix routines over ℤ, ℚ and ℚ(β).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::field::{AlgNum, PisotField};
use super::poly::IntPolynomial;

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn int_identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn rat_identity(n: usize) -> RatMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect()
}

pub fn int_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for t in 0..k {
                        if !a[i][t].is_zero() && !b[t][j].is_zero() {
                            s += &a[i][t] * &b[t][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn rat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = BigRational::zero();
                    for t in 0..k {
                        if !a[i][t].is_zero() && !b[t][j].is_zero() {
                            s += &a[i][t] * &b[t][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn to_rat(a: &IntMatrix) -> RatMatrix {
    a.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect()
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Characteristic polynomial det(xI − A) by Faddeev–LeVerrier; every division is exact.
pub fn char_poly(a: &IntMatrix) -> IntPolynomial {
    let n = a.len();
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    let mut mk = int_identity(n);
    for k in 1..=n {
        let am = int_mul(a, &mk);
        let tr: BigInt = (0..n).map(|i| am[i][i].clone()).sum();
        let ck = -tr / BigInt::from(k);
        c[n - k] = ck.clone();
        mk = am;
        for (i, row) in mk.iter_mut().enumerate() {
            row[i] += &ck;
        }
    }
    IntPolynomial::new(c)
}

/// p(A) for a rational polynomial given by its coefficients, constant first.
pub fn rat_poly_at(coeffs: &[BigRational], a: &RatMatrix) -> RatMatrix {
    let n = a.len();
    let mut acc = vec![vec![BigRational::zero(); n]; n];
    for c in coeffs.iter().rev() {
        acc = rat_mul(&acc, a);
        for (i, row) in acc.iter_mut().enumerate() {
            row[i] += c;
        }
    }
    acc
}

/// Inverse of a square rational matrix, `None` when singular.
pub fn rat_inverse(a: &RatMatrix) -> Option<RatMatrix> {
    let n = a.len();
    let mut m: RatMatrix = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..2 * n {
                    let v = &m[col][j] * &f;
                    m[r][j] -= v;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn int_det(a: &IntMatrix) -> BigInt {
    // Bareiss fraction-free elimination
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Row-style Hermite normal form basis of the ℤ-span of `vectors` (all of equal length).
pub fn lattice_basis(vectors: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = vectors.iter().filter(|v| v.iter().any(|x| !x.is_zero())).cloned().collect();
    let n = vectors.first().map_or(0, Vec::len);
    let mut basis = Vec::new();
    for col in 0..n {
        // gcd-reduce column `col` among the remaining rows
        loop {
            let nz: Vec<usize> = (0..rows.len()).filter(|&r| !rows[r][col].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&r| rows[r][col].abs()).expect("nonempty");
            for &r in &nz {
                if r != piv {
                    let q = rows[r][col].div_floor(&rows[piv][col]);
                    let sub: Vec<BigInt> = rows[piv].iter().map(|x| x * &q).collect();
                    for (x, s) in rows[r].iter_mut().zip(sub) {
                        *x -= s;
                    }
                }
            }
        }
        if let Some(r) = (0..rows.len()).find(|&r| !rows[r][col].is_zero()) {
            let mut v = rows.remove(r);
            if v[col].is_negative() {
                v.iter_mut().for_each(|x| *x = -x.clone());
            }
            basis.push(v);
        }
        rows.retain(|v| v.iter().any(|x| !x.is_zero()));
    }
    // reduce entries above pivots
    for i in 0..basis.len() {
        let pc = basis[i].iter().position(|x| !x.is_zero()).expect("nonzero row");
        for k in 0..i {
            let q = basis[k][pc].div_floor(&basis[i][pc]);
            if !q.is_zero() {
                let sub: Vec<BigInt> = basis[i].iter().map(|x| x * &q).collect();
                for (x, s) in basis[k].iter_mut().zip(sub) {
                    *x -= s;
                }
            }
        }
    }
    basis
}

/// One nonzero solution of A x = 0 over ℚ(β) when the kernel is one-dimensional.
pub fn alg_kernel_vector(f: &PisotField, a: &[Vec<AlgNum>]) -> Option<Vec<AlgNum>> {
    let rows = a.len();
    let n = a.first()?.len();
    let mut m: Vec<Vec<AlgNum>> = a.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][col].inv().ok()?;
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][col].is_zero() {
                let fct = m[i][col].clone();
                for j in 0..n {
                    let v = &m[r][j] * &fct;
                    m[i][j] = &m[i][j] - &v;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    if free.len() != 1 {
        return None;
    }
    let fc = free[0];
    let mut x = vec![f.zero(); n];
    x[fc] = f.one();
    for (i, &pc) in pivots.iter().enumerate() {
        x[pc] = -&m[i][fc];
    }
    Some(x)
}

/// Solves the square rational system A x = b for a vector b over ℚ(β).
pub fn rat_solve_alg(a_inv: &RatMatrix, b: &[AlgNum]) -> Vec<AlgNum> {
    a_inv
        .iter()
        .map(|row| {
            let mut acc = b[0].field().zero();
            for (c, v) in row.iter().zip(b) {
                if !c.is_zero() {
                    acc = &acc + &v.mul_rational(c);
                }
            }
            acc
        })
        .collect()
}

pub fn rat_apply_alg(a: &RatMatrix, v: &[AlgNum]) -> Vec<AlgNum> {
    rat_solve_alg(a, v)
}

pub fn int_apply_alg(a: &IntMatrix, v: &[AlgNum]) -> Vec<AlgNum> {
    a.iter()
        .map(|row| {
            let mut acc = v[0].field().zero();
            for (c, x) in row.iter().zip(v) {
                if !c.is_zero() {
                    acc = &acc + &x.mul_int(c);
                }
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn im(rows: &[&[i64]]) -> IntMatrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn char_poly_matches_cofactor_expansion() {
        // tribonacci companion: x^3 - x^2 - x - 1
        let a = im(&[&[1, 1, 1], &[1, 0, 0], &[0, 1, 0]]);
        assert_eq!(char_poly(&a), IntPolynomial::from_i64(&[-1, -1, -1, 1]));
        let b = im(&[&[2, 1], &[1, 1]]);
        assert_eq!(char_poly(&b), IntPolynomial::from_i64(&[1, -3, 1]));
        // 3x3 with known det: tr=6, sum of minors=11, det=6 → (x-1)(x-2)(x-3)
        let c = im(&[&[1, 0, 0], &[5, 2, 0], &[7, 8, 3]]);
        assert_eq!(char_poly(&c), IntPolynomial::from_i64(&[-6, 11, -6, 1]));
    }

    #[test]
    fn determinant_and_inverse() {
        let a = im(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(int_det(&a), BigInt::from(18));
        let inv = rat_inverse(&to_rat(&a)).unwrap();
        assert_eq!(rat_mul(&to_rat(&a), &inv), rat_identity(3));
        assert_eq!(int_det(&im(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert!(rat_inverse(&to_rat(&im(&[&[1, 2], &[2, 4]]))).is_none());
    }

    #[test]
    fn lattice_basis_spans() {
        let v = im(&[&[2, 4], &[3, 6], &[0, 5]]);
        let b = lattice_basis(&v);
        // span of (2,4),(3,6),(0,5) = {(a, 2a + 5k)} with basis (1,2),(0,5)
        assert_eq!(b, im(&[&[1, 2], &[0, 5]]));
    }
}
