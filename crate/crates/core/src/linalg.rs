//! Small fixed-size complex matrices and a cyclic Jacobi eigensolver for
//! Hermitian matrices.

use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat<const N: usize> = [[C64; N]; N];
pub type Mat2 = CMat<2>;
pub type Mat4 = CMat<4>;
pub type RMat3 = [[f64; 3]; 3];

/// Jacobi stops once the off-diagonal Frobenius norm falls below this
/// fraction of the full norm.
pub const JACOBI_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn zeros<const N: usize>() -> CMat<N> {
    [[ZERO; N]; N]
}

pub fn identity<const N: usize>() -> CMat<N> {
    let mut m = zeros();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn matmul<const N: usize>(a: &CMat<N>, b: &CMat<N>) -> CMat<N> {
    let mut out = zeros();
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            if aik == ZERO {
                continue;
            }
            for j in 0..N {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn dagger<const N: usize>(a: &CMat<N>) -> CMat<N> {
    let mut out = zeros();
    for i in 0..N {
        for j in 0..N {
            out[j][i] = a[i][j].conj();
        }
    }
    out
}

pub fn add<const N: usize>(a: &CMat<N>, b: &CMat<N>) -> CMat<N> {
    let mut out = *a;
    for (orow, brow) in out.iter_mut().zip(b) {
        for (o, x) in orow.iter_mut().zip(brow) {
            *o += x;
        }
    }
    out
}

pub fn sub<const N: usize>(a: &CMat<N>, b: &CMat<N>) -> CMat<N> {
    add(a, &scale(b, -1.0))
}

pub fn scale<const N: usize>(a: &CMat<N>, s: f64) -> CMat<N> {
    a.map(|row| row.map(|x| x * s))
}

pub fn trace<const N: usize>(a: &CMat<N>) -> C64 {
    (0..N).map(|i| a[i][i]).sum()
}

/// `tr(a b)` without forming the product.
pub fn trace_of_product<const N: usize>(a: &CMat<N>, b: &CMat<N>) -> C64 {
    let mut acc = ZERO;
    for i in 0..N {
        for k in 0..N {
            acc += a[i][k] * b[k][i];
        }
    }
    acc
}

/// `U a U†`.
pub fn conjugate<const N: usize>(u: &CMat<N>, a: &CMat<N>) -> CMat<N> {
    matmul(&matmul(u, a), &dagger(u))
}

pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// Largest entrywise `|a_ij - conj(a_ji)|`.
pub fn hermitian_deviation<const N: usize>(a: &CMat<N>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..N {
        for j in i..N {
            worst = worst.max((a[i][j] - a[j][i].conj()).norm());
        }
    }
    worst
}

pub fn max_abs_diff<const N: usize>(a: &CMat<N>, b: &CMat<N>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            worst = worst.max((a[i][j] - b[i][j]).norm());
        }
    }
    worst
}

/// Eigenvalues in ascending order with the matching eigenvectors as columns.
#[derive(Debug, Clone, Copy)]
pub struct HermitianEigen<const N: usize> {
    pub values: [f64; N],
    pub vectors: CMat<N>,
    pub sweeps: usize,
}

/// Cyclic Jacobi on the Hermitian part of `m`.
///
/// Each step first rephases column `q` so that `a_pq` is real and positive,
/// then applies a real Givens rotation that zeroes it.
pub fn hermitian_eigen<const N: usize>(m: &CMat<N>) -> HermitianEigen<N> {
    let mut a = zeros::<N>();
    for i in 0..N {
        for j in 0..N {
            a[i][j] = (m[i][j] + m[j][i].conj()) * 0.5;
        }
    }
    let mut v = identity::<N>();
    let total: f64 = a.iter().flatten().map(C64::norm_sqr).sum();
    let mut sweeps = 0;

    while sweeps < JACOBI_MAX_SWEEPS {
        let off: f64 = (0..N)
            .flat_map(|p| (p + 1..N).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q].norm_sqr())
            .sum();
        if off == 0.0 || off.sqrt() <= JACOBI_TOL * total.sqrt() {
            break;
        }
        sweeps += 1;
        for p in 0..N {
            for q in p + 1..N {
                let g = a[p][q];
                let mag = g.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = g / mag;
                for row in a.iter_mut() {
                    row[q] *= phase.conj();
                }
                for x in a[q].iter_mut() {
                    *x *= phase;
                }
                for row in v.iter_mut() {
                    row[q] *= phase.conj();
                }

                let theta = (a[q][q].re - a[p][p].re) / (2.0 * mag);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (ip, iq) = (row[p], row[q]);
                    row[p] = ip * c - iq * s;
                    row[q] = ip * s + iq * c;
                }
                for j in 0..N {
                    let (pj, qj) = (a[p][j], a[q][j]);
                    a[p][j] = pj * c - qj * s;
                    a[q][j] = pj * s + qj * c;
                }
                for row in v.iter_mut() {
                    let (ip, iq) = (row[p], row[q]);
                    row[p] = ip * c - iq * s;
                    row[q] = ip * s + iq * c;
                }
                a[p][q] = ZERO;
                a[q][p] = ZERO;
                a[p][p].im = 0.0;
                a[q][q].im = 0.0;
            }
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a[i][i].re.total_cmp(&a[j][j].re));
    let values = order.map(|i| a[i][i].re);
    let mut vectors = zeros::<N>();
    for (col, &src) in order.iter().enumerate() {
        for row in 0..N {
            vectors[row][col] = v[row][src];
        }
    }
    HermitianEigen { values, vectors, sweeps }
}

pub fn hermitian_eigenvalues<const N: usize>(m: &CMat<N>) -> [f64; N] {
    hermitian_eigen(m).values
}

pub fn to_complex3(m: &RMat3) -> CMat<3> {
    m.map(|row| row.map(|x| C64::new(x, 0.0)))
}

/// Ascending eigenvalues of a real symmetric 3×3 matrix.
pub fn symmetric_eigenvalues3(m: &RMat3) -> [f64; 3] {
    hermitian_eigenvalues(&to_complex3(m))
}

pub fn mat3_mul(a: &RMat3, b: &RMat3) -> RMat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat3_transpose(a: &RMat3) -> RMat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[j][i] = a[i][j];
        }
    }
    out
}

pub fn det3(a: &RMat3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

pub fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}
