//! Dense matrices over a [`Field`] and `σ`-semilinear maps.

use crate::scalars::Field;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// # Panics
    ///
    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<E>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        Self::from_fn(r, c, |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<E> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<E>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn entries(&self) -> &[E] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<T: Clone>(&self, f: impl Fn(&E) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }
}

impl<E: Clone + PartialEq> Matrix<E> {
    pub fn zeros<F: Field<Elem = E>>(f: &F, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| f.zero())
    }

    pub fn identity<F: Field<Elem = E>>(f: &F, n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { f.one() } else { f.zero() })
    }

    pub fn diagonal<F: Field<Elem = E>>(f: &F, d: &[E]) -> Self {
        Self::from_fn(d.len(), d.len(), |i, j| if i == j { d[i].clone() } else { f.zero() })
    }

    pub fn mul<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = f.zero();
            for k in 0..self.cols {
                acc = f.add(&acc, &f.mul(self.get(i, k), other.get(k, j)));
            }
            acc
        })
    }

    pub fn apply<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> Vec<E> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for (k, x) in v.iter().enumerate() {
                    acc = f.add(&acc, &f.mul(self.get(i, k), x));
                }
                acc
            })
            .collect()
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| f.add(self.get(i, j), other.get(i, j)))
    }

    pub fn sub<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| f.sub(self.get(i, j), other.get(i, j)))
    }

    pub fn scale<F: Field<Elem = E>>(&self, f: &F, s: &E) -> Self {
        self.map(|x| f.mul(x, s))
    }

    /// Entrywise `σ`.
    pub fn conj<F: Field<Elem = E>>(&self, f: &F) -> Self {
        self.map(|x| f.conj(x))
    }

    /// `σ(A)ᵀ`.
    pub fn adjoint<F: Field<Elem = E>>(&self, f: &F) -> Self {
        self.conj(f).transpose()
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.data.iter().all(|x| f.is_zero(x))
    }

    pub fn is_identity<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        f.is_one(x)
                    } else {
                        f.is_zero(x)
                    }
                })
            })
    }

    /// Row echelon form by Gaussian elimination; returns the reduced matrix,
    /// its pivot columns and the determinant factor from the row operations.
    fn eliminate<F: Field<Elem = E>>(&self, f: &F, reduce: bool) -> (Self, Vec<usize>, E) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut factor = f.one();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
                factor = f.neg(&factor);
            }
            let piv = m.get(r, c).clone();
            factor = f.mul(&factor, &piv);
            let inv = f.inv(&piv).expect("nonzero pivot");
            for j in 0..m.cols {
                let v = f.mul(m.get(r, j), &inv);
                m.set(r, j, v);
            }
            let start = if reduce { 0 } else { r + 1 };
            for i in start..m.rows {
                if i == r || f.is_zero(m.get(i, c)) {
                    continue;
                }
                let s = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = f.sub(m.get(i, j), &f.mul(&s, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots, factor)
    }

    pub fn det<F: Field<Elem = E>>(&self, f: &F) -> E {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let (_, pivots, factor) = self.eliminate(f, false);
        if pivots.len() < self.rows {
            f.zero()
        } else {
            factor
        }
    }

    pub fn rank<F: Field<Elem = E>>(&self, f: &F) -> usize {
        self.eliminate(f, false).1.len()
    }

    /// Reduced row echelon form with its pivot columns.
    pub fn rref<F: Field<Elem = E>>(&self, f: &F) -> (Self, Vec<usize>) {
        let (m, p, _) = self.eliminate(f, true);
        (m, p)
    }

    pub fn inverse<F: Field<Elem = E>>(&self, f: &F) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                f.one()
            } else {
                f.zero()
            }
        });
        let (r, pivots) = aug.rref(f);
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| r.get(i, n + j).clone()))
    }

    /// Basis of `{x : A x = 0}`.
    pub fn nullspace<F: Field<Elem = E>>(&self, f: &F) -> Vec<Vec<E>> {
        let (r, pivots) = self.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![f.zero(); self.cols];
                v[fc] = f.one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(r.get(row, fc));
                }
                v
            })
            .collect()
    }

    /// Some `x` with `A x = b`.
    pub fn solve<F: Field<Elem = E>>(&self, f: &F, b: &[E]) -> Option<Vec<E>> {
        let aug = Self::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                b[i].clone()
            }
        });
        let (r, pivots) = aug.rref(f);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![f.zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols).clone();
        }
        Some(x)
    }
}

pub fn vec_add<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    a.iter().zip(b).map(|(x, y)| f.add(x, y)).collect()
}

pub fn vec_sub<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    a.iter().zip(b).map(|(x, y)| f.sub(x, y)).collect()
}

/// `v·s`, scalars acting on the right.
pub fn vec_scale<F: Field>(f: &F, v: &[F::Elem], s: &F::Elem) -> Vec<F::Elem> {
    v.iter().map(|x| f.mul(x, s)).collect()
}

pub fn vec_conj<F: Field>(f: &F, v: &[F::Elem]) -> Vec<F::Elem> {
    v.iter().map(|x| f.conj(x)).collect()
}

pub fn vec_is_zero<F: Field>(f: &F, v: &[F::Elem]) -> bool {
    v.iter().all(|x| f.is_zero(x))
}

pub fn unit_vector<F: Field>(f: &F, n: usize, i: usize) -> Vec<F::Elem> {
    (0..n).map(|k| if k == i { f.one() } else { f.zero() }).collect()
}

/// Scales `v` so that its first nonzero coordinate is one.
pub fn normalize_projective<F: Field>(f: &F, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let lead = v.iter().find(|x| !f.is_zero(x))?;
    let inv = f.inv(lead)?;
    Some(vec_scale(f, v, &inv))
}

/// Reduced row echelon basis of the span of `vectors`; a canonical key for the subspace.
pub fn span_key<F: Field>(f: &F, vectors: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = Matrix::from_rows(vectors.to_vec());
    let (r, pivots) = m.rref(f);
    (0..pivots.len()).map(|i| r.row(i)).collect()
}

/// Whether a map is linear or composed with `σ` on coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Companion {
    Identity,
    Sigma,
}

impl Companion {
    pub fn compose(self, other: Companion) -> Companion {
        if self == other {
            Companion::Identity
        } else {
            Companion::Sigma
        }
    }

    pub fn apply<F: Field>(self, f: &F, x: &F::Elem) -> F::Elem {
        match self {
            Companion::Identity => x.clone(),
            Companion::Sigma => f.conj(x),
        }
    }
}

/// `v ↦ A·φ(v)` with `φ` applied coordinatewise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SemiMap<E> {
    pub matrix: Matrix<E>,
    pub companion: Companion,
}

impl<E: Clone + PartialEq> SemiMap<E> {
    pub fn linear(matrix: Matrix<E>) -> Self {
        Self {
            matrix,
            companion: Companion::Identity,
        }
    }

    pub fn new(matrix: Matrix<E>, companion: Companion) -> Self {
        Self { matrix, companion }
    }

    pub fn identity<F: Field<Elem = E>>(f: &F, n: usize) -> Self {
        Self::linear(Matrix::identity(f, n))
    }

    fn companion_matrix<F: Field<Elem = E>>(&self, f: &F, m: &Matrix<E>) -> Matrix<E> {
        match self.companion {
            Companion::Identity => m.clone(),
            Companion::Sigma => m.conj(f),
        }
    }

    pub fn apply<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> Vec<E> {
        let w: Vec<E> = v.iter().map(|x| self.companion.apply(f, x)).collect();
        self.matrix.apply(f, &w)
    }

    /// `self ∘ other`.
    pub fn compose<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        Self {
            matrix: self.matrix.mul(f, &self.companion_matrix(f, &other.matrix)),
            companion: self.companion.compose(other.companion),
        }
    }

    pub fn inverse<F: Field<Elem = E>>(&self, f: &F) -> Option<Self> {
        let inv = self.matrix.inverse(f)?;
        Some(Self {
            matrix: self.companion_matrix(f, &inv),
            companion: self.companion,
        })
    }

    pub fn is_identity<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.normalized(f).companion == Companion::Identity && self.matrix.is_identity(f)
    }

    /// Drops a `σ` companion when `σ = id`.
    pub fn normalized<F: Field<Elem = E>>(&self, f: &F) -> Self {
        let companion = if f.has_sigma() { self.companion } else { Companion::Identity };
        Self {
            matrix: self.matrix.clone(),
            companion,
        }
    }

    pub fn scale<F: Field<Elem = E>>(&self, f: &F, s: &E) -> Self {
        Self {
            matrix: self.matrix.scale(f, s),
            companion: self.companion,
        }
    }
}
