//! Hand bindings to the five LAPACK routines the reference solver needs.
//!
//! The build script links the system `lapack` library; any provider that
//! exports the Fortran symbols works. Matrices are column-major, which is
//! also `nalgebra`'s layout, so buffers pass through without copies.
//! `num_complex::Complex64` is layout-compatible with Fortran's
//! `COMPLEX*16`.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::os::raw::{c_char, c_int};

extern "C" {
    fn zgeev_(
        jobvl: *const c_char,
        jobvr: *const c_char,
        n: *const c_int,
        a: *mut Complex64,
        lda: *const c_int,
        w: *mut Complex64,
        vl: *mut Complex64,
        ldvl: *const c_int,
        vr: *mut Complex64,
        ldvr: *const c_int,
        work: *mut Complex64,
        lwork: *const c_int,
        rwork: *mut f64,
        info: *mut c_int,
    );
    fn zgetrf_(
        m: *const c_int,
        n: *const c_int,
        a: *mut Complex64,
        lda: *const c_int,
        ipiv: *mut c_int,
        info: *mut c_int,
    );
    fn zgetrs_(
        trans: *const c_char,
        n: *const c_int,
        nrhs: *const c_int,
        a: *const Complex64,
        lda: *const c_int,
        ipiv: *const c_int,
        b: *mut Complex64,
        ldb: *const c_int,
        info: *mut c_int,
    );
    fn zgecon_(
        norm: *const c_char,
        n: *const c_int,
        a: *const Complex64,
        lda: *const c_int,
        anorm: *const f64,
        rcond: *mut f64,
        work: *mut Complex64,
        rwork: *mut f64,
        info: *mut c_int,
    );
    fn dstev_(
        jobz: *const c_char,
        n: *const c_int,
        d: *mut f64,
        e: *mut f64,
        z: *mut f64,
        ldz: *const c_int,
        work: *mut f64,
        info: *mut c_int,
    );
}

const JOB_NONE: *const c_char = c"N".as_ptr();
const JOB_VECTORS: *const c_char = c"V".as_ptr();
const NORM_ONE: *const c_char = c"1".as_ptr();
/// Same byte as JOB_NONE; zgetrs reads it as "no transpose".
const TRANS_NONE: *const c_char = JOB_NONE;

pub(crate) struct Eigensystem {
    pub values: Vec<Complex64>,
    /// Right eigenvectors, one per column, in the order of `values`.
    pub vectors: DMatrix<Complex64>,
}

/// Dense nonsymmetric eigendecomposition. Consumes the matrix (LAPACK
/// overwrites it).
pub(crate) fn eig(mut a: DMatrix<Complex64>) -> Result<Eigensystem> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eig needs a square matrix");
    assert!(n > 0);
    let ni = n as c_int;
    let one: c_int = 1;
    let mut values = vec![Complex64::default(); n];
    let mut vectors = DMatrix::<Complex64>::zeros(n, n);
    let mut vl_dummy = [Complex64::default(); 1];
    let mut rwork = vec![0.0f64; 2 * n];
    let mut info: c_int = 0;

    let mut work_query = [Complex64::default(); 1];
    let query: c_int = -1;
    unsafe {
        zgeev_(
            JOB_NONE,
            JOB_VECTORS,
            &ni,
            a.as_mut_slice().as_mut_ptr(),
            &ni,
            values.as_mut_ptr(),
            vl_dummy.as_mut_ptr(),
            &one,
            vectors.as_mut_slice().as_mut_ptr(),
            &ni,
            work_query.as_mut_ptr(),
            &query,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "zgeev",
            info,
        });
    }
    let lwork = (work_query[0].re as c_int).max(1);
    let mut work = vec![Complex64::default(); lwork as usize];
    unsafe {
        zgeev_(
            JOB_NONE,
            JOB_VECTORS,
            &ni,
            a.as_mut_slice().as_mut_ptr(),
            &ni,
            values.as_mut_ptr(),
            vl_dummy.as_mut_ptr(),
            &one,
            vectors.as_mut_slice().as_mut_ptr(),
            &ni,
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "zgeev",
            info,
        });
    }
    Ok(Eigensystem { values, vectors })
}

pub(crate) struct LuFactors {
    lu: DMatrix<Complex64>,
    ipiv: Vec<c_int>,
    /// 1-norm of the matrix before factorization, for `rcond`.
    anorm: f64,
}

/// LU factorization with partial pivoting. `info > 0` (an exactly singular
/// pivot) is reported as a LAPACK error.
pub(crate) fn lu(mut a: DMatrix<Complex64>) -> Result<LuFactors> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "lu needs a square matrix");
    let ni = n as c_int;
    let anorm = (0..n)
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let mut ipiv = vec![0 as c_int; n];
    let mut info: c_int = 0;
    unsafe {
        zgetrf_(
            &ni,
            &ni,
            a.as_mut_slice().as_mut_ptr(),
            &ni,
            ipiv.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "zgetrf",
            info,
        });
    }
    Ok(LuFactors { lu: a, ipiv, anorm })
}

impl LuFactors {
    pub fn solve(&self, b: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        let n = self.lu.nrows();
        assert_eq!(b.len(), n, "right-hand side length mismatch");
        let ni = n as c_int;
        let one: c_int = 1;
        let mut x = b.clone();
        let mut info: c_int = 0;
        unsafe {
            zgetrs_(
                TRANS_NONE,
                &ni,
                &one,
                self.lu.as_slice().as_ptr(),
                &ni,
                self.ipiv.as_ptr(),
                x.as_mut_slice().as_mut_ptr(),
                &ni,
                &mut info,
            );
        }
        if info != 0 {
            return Err(Error::Lapack {
                routine: "zgetrs",
                info,
            });
        }
        Ok(x)
    }

    /// Reciprocal condition number estimate in the 1-norm.
    pub fn rcond(&self) -> Result<f64> {
        let n = self.lu.nrows();
        let ni = n as c_int;
        let mut rcond = 0.0f64;
        let mut work = vec![Complex64::default(); 2 * n];
        let mut rwork = vec![0.0f64; 2 * n];
        let mut info: c_int = 0;
        unsafe {
            zgecon_(
                NORM_ONE,
                &ni,
                self.lu.as_slice().as_ptr(),
                &ni,
                &self.anorm,
                &mut rcond,
                work.as_mut_ptr(),
                rwork.as_mut_ptr(),
                &mut info,
            );
        }
        if info != 0 {
            return Err(Error::Lapack {
                routine: "zgecon",
                info,
            });
        }
        Ok(rcond)
    }
}

/// Eigenvalues (ascending) of a symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off`. Used for quadrature node computation.
pub(crate) fn tridiagonal_eigenvalues(mut diag: Vec<f64>, mut off: Vec<f64>) -> Result<Vec<f64>> {
    let n = diag.len();
    assert!(n > 0 && off.len() == n - 1);
    let ni = n as c_int;
    let one: c_int = 1;
    let mut z_dummy = [0.0f64; 1];
    let mut work_dummy = [0.0f64; 1];
    let mut info: c_int = 0;
    unsafe {
        dstev_(
            JOB_NONE,
            &ni,
            diag.as_mut_ptr(),
            off.as_mut_ptr(),
            z_dummy.as_mut_ptr(),
            &one,
            work_dummy.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "dstev",
            info,
        });
    }
    Ok(diag)
}
