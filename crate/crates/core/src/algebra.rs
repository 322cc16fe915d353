//! Metric nilpotent Lie algebras given by rational structure constants.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, OnceLock};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{
    self, gram_dot, inverse, is_zero_vec, leading_minors, null_space, orthogonal_complement,
    orthogonal_projector, span_basis, unit, Matrix,
};
use crate::scalar::{Scalar, Q};

/// Structure constants and metric converted into a scalar ring `T`.
///
/// `consts` holds `(i, j, k, c)` with `i < j`, meaning `[e_i, e_j] ∋ c e_k` (0-based).
#[derive(Clone, Debug)]
pub struct Structure<T> {
    pub n: usize,
    pub consts: Vec<(usize, usize, usize, T)>,
    pub gram: Matrix<T>,
    pub gram_inv: Matrix<T>,
    pub orthonormal: bool,
}

impl<T: Scalar> Structure<T> {
    pub fn bracket(&self, a: &[T], b: &[T]) -> Vec<T> {
        let mut r = vec![T::zero(); self.n];
        for (i, j, k, c) in &self.consts {
            let (ai, aj, bi, bj) = (&a[*i], &a[*j], &b[*i], &b[*j]);
            let mut t = T::zero();
            if !ai.is_zero() && !bj.is_zero() {
                t = t + ai.clone() * bj.clone();
            }
            if !aj.is_zero() && !bi.is_zero() {
                t = t - aj.clone() * bi.clone();
            }
            if t.is_zero() {
                continue;
            }
            let cur = std::mem::replace(&mut r[*k], T::zero());
            r[*k] = cur + c.clone() * t;
        }
        r
    }

    /// Matrix of `ad(x)`: column `j` is `[x, e_j]`.
    pub fn ad(&self, x: &[T]) -> Matrix<T> {
        let mut m = Matrix::zeros(self.n, self.n);
        for (i, j, k, c) in &self.consts {
            // [x, e_j] gets c x_i e_k ; [x, e_i] gets -c x_j e_k
            if !x[*i].is_zero() {
                let cur = std::mem::replace(&mut m[(*k, *j)], T::zero());
                m[(*k, *j)] = cur + c.clone() * x[*i].clone();
            }
            if !x[*j].is_zero() {
                let cur = std::mem::replace(&mut m[(*k, *i)], T::zero());
                m[(*k, *i)] = cur - c.clone() * x[*j].clone();
            }
        }
        m
    }

    pub fn lower(&self, v: &[T]) -> Vec<T> {
        if self.orthonormal {
            v.to_vec()
        } else {
            self.gram.mul_vec(v)
        }
    }

    pub fn raise(&self, v: &[T]) -> Vec<T> {
        if self.orthonormal {
            v.to_vec()
        } else {
            self.gram_inv.mul_vec(v)
        }
    }

    pub fn inner(&self, a: &[T], b: &[T]) -> T {
        linalg::dot(a, &self.lower(b))
    }

    /// `ad^τ(x)` as a matrix: `G⁻¹ ad(x)ᵀ G`.
    pub fn ad_transpose(&self, x: &[T]) -> Matrix<T> {
        let m = self.ad(x).transpose();
        if self.orthonormal {
            m
        } else {
            self.gram_inv.mul(&m).mul(&self.gram)
        }
    }

    /// `ad^τ(x) v` without assembling the matrix.
    pub fn ad_transpose_apply(&self, x: &[T], v: &[T]) -> Vec<T> {
        let u = self.lower(v);
        let mut r = vec![T::zero(); self.n];
        for (i, j, k, c) in &self.consts {
            if u[*k].is_zero() {
                continue;
            }
            let cu = c.clone() * u[*k].clone();
            if !x[*i].is_zero() {
                let cur = std::mem::replace(&mut r[*j], T::zero());
                r[*j] = cur + cu.clone() * x[*i].clone();
            }
            if !x[*j].is_zero() {
                let cur = std::mem::replace(&mut r[*i], T::zero());
                r[*i] = cur - cu * x[*j].clone();
            }
        }
        self.raise(&r)
    }
}

/// Structural data derived from the bracket and metric.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraAnalysis {
    pub step: usize,
    pub center_basis: Vec<Vec<Q>>,
    /// `C⁰ ⊇ C¹ ⊇ … ⊇ C^step = 0`, each as a row-reduced basis.
    pub commutator_chain: Vec<Vec<Vec<Q>>>,
    /// Orthogonal complement of the center (step ≤ 2) or of the commutator (step 3+).
    pub v_complement: Vec<Vec<Q>>,
    /// Basis of the subspace complementary to `v_complement`.
    pub complemented: Vec<Vec<Q>>,
    pub proj_v: Matrix<Q>,
    pub proj_complemented: Matrix<Q>,
}

impl AlgebraAnalysis {
    pub fn commutator(&self) -> &[Vec<Q>] {
        self.commutator_chain
            .get(1)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn center_dim(&self) -> usize {
        self.center_basis.len()
    }
}

#[derive(Clone, Debug)]
pub struct LieAlgebra {
    name: String,
    dim: usize,
    /// 0-based `(i, j) → [(k, c)]` with `i < j`.
    structure: BTreeMap<(usize, usize), Vec<(usize, Q)>>,
    metric: Matrix<Q>,
    params: BTreeMap<String, Q>,
    labels: Vec<String>,
    q_table: Arc<Structure<Q>>,
    f_table: Arc<Structure<f64>>,
    analysis: OnceLock<std::result::Result<AlgebraAnalysis, Error>>,
}

impl PartialEq for LieAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.dim == other.dim
            && self.structure == other.structure
            && self.metric == other.metric
            && self.params == other.params
    }
}

impl LieAlgebra {
    /// Builds and validates an algebra from 1-based entries `(i, j, k, c)`: `[e_i, e_j] ∋ c e_k`.
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        brackets: &[(usize, usize, usize, Q)],
        metric: Option<Matrix<Q>>,
        params: BTreeMap<String, Q>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        let mut structure: BTreeMap<(usize, usize), Vec<(usize, Q)>> = BTreeMap::new();
        let mut seen: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
        let pairs: BTreeSet<(usize, usize)> = brackets.iter().map(|e| (e.0, e.1)).collect();
        for (i, j, k, c) in brackets {
            for &idx in [i, j, k] {
                if idx == 0 || idx > dim {
                    return Err(Error::IndexOutOfRange { index: idx, dim });
                }
            }
            if i > j && pairs.contains(&(*j, *i)) {
                return Err(Error::AmbiguousBracket { i: *j, j: *i });
            }
            if i >= j {
                return Err(Error::UnorderedBracket { i: *i, j: *j });
            }
            if !seen.insert((*i, *j, *k)) {
                return Err(Error::AmbiguousBracket { i: *i, j: *j });
            }
            if c.is_zero() {
                continue;
            }
            structure
                .entry((i - 1, j - 1))
                .or_default()
                .push((k - 1, c.clone()));
        }
        let metric = metric.unwrap_or_else(|| Matrix::identity(dim));
        if metric.rows() != dim || metric.cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: metric.rows(),
            });
        }
        if metric != metric.transpose() {
            return Err(Error::InvalidMetric("Gram matrix is not symmetric".into()));
        }
        if let Some((k, _)) = leading_minors(&metric)
            .iter()
            .enumerate()
            .find(|(_, m)| **m <= Q::zero())
        {
            return Err(Error::InvalidMetric(format!(
                "leading principal minor of order {} is not positive",
                k + 1
            )));
        }
        let metric_inv = inverse(&metric)?;
        let consts: Vec<(usize, usize, usize, Q)> = structure
            .iter()
            .flat_map(|(&(i, j), ks)| ks.iter().map(move |(k, c)| (i, j, *k, c.clone())))
            .collect();
        let orthonormal = metric == Matrix::identity(dim);
        let q_table = Structure {
            n: dim,
            consts: consts.clone(),
            gram: metric.clone(),
            gram_inv: metric_inv.clone(),
            orthonormal,
        };
        let f_table = convert_structure(&q_table);
        let alg = LieAlgebra {
            name: name.into(),
            dim,
            structure,
            metric,
            params,
            labels: (1..=dim).map(|i| format!("e{i}")).collect(),
            q_table: Arc::new(q_table),
            f_table: Arc::new(f_table),
            analysis: OnceLock::new(),
        };
        alg.check_jacobi()?;
        Ok(alg)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> &Matrix<Q> {
        &self.metric
    }

    pub fn metric_inv(&self) -> &Matrix<Q> {
        &self.q_table.gram_inv
    }

    pub fn params(&self) -> &BTreeMap<String, Q> {
        &self.params
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// 1-based `(i, j, k, c)` entries in canonical order.
    pub fn bracket_entries(&self) -> Vec<(usize, usize, usize, Q)> {
        self.q_table
            .consts
            .iter()
            .map(|(i, j, k, c)| (i + 1, j + 1, k + 1, c.clone()))
            .collect()
    }

    pub fn structure_q(&self) -> &Structure<Q> {
        &self.q_table
    }

    pub fn structure_f64(&self) -> &Structure<f64> {
        &self.f_table
    }

    pub fn structure<T: Scalar>(&self) -> Structure<T> {
        convert_structure(&self.q_table)
    }

    /// Index of a basis label (`X1`, `Z`, ...) or of `e<k>` (1-based).
    pub fn basis_index(&self, label: &str) -> Option<usize> {
        if let Some(i) = self.labels.iter().position(|l| l == label) {
            return Some(i);
        }
        label
            .strip_prefix('e')
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|&k| k >= 1 && k <= self.dim)
            .map(|k| k - 1)
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Q> {
        unit(self.dim, i)
    }

    fn check_len(&self, v: &[Q]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(())
    }

    pub fn bracket(&self, a: &[Q], b: &[Q]) -> Result<Vec<Q>> {
        self.check_len(a)?;
        self.check_len(b)?;
        Ok(self.q_table.bracket(a, b))
    }

    pub fn ad(&self, x: &[Q]) -> Result<Matrix<Q>> {
        self.check_len(x)?;
        Ok(self.q_table.ad(x))
    }

    pub fn ad_transpose(&self, x: &[Q]) -> Result<Matrix<Q>> {
        self.check_len(x)?;
        Ok(self.q_table.ad_transpose(x))
    }

    pub fn inner(&self, a: &[Q], b: &[Q]) -> Q {
        gram_dot(&self.metric, a, b)
    }

    fn check_jacobi(&self) -> Result<()> {
        let n = self.dim;
        let t = &self.q_table;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (a, b, c) = (unit(n, i), unit(n, j), unit(n, k));
                    let s1 = t.bracket(&t.bracket(&a, &b), &c);
                    let s2 = t.bracket(&t.bracket(&b, &c), &a);
                    let s3 = t.bracket(&t.bracket(&c, &a), &b);
                    let sum = linalg::vadd(&linalg::vadd(&s1, &s2), &s3);
                    if !is_zero_vec(&sum) {
                        return Err(Error::JacobiViolation {
                            triple: (i + 1, j + 1, k + 1),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Step, center, lower central series and orthogonal splitting (cached).
    pub fn analyze(&self) -> Result<&AlgebraAnalysis> {
        self.analysis
            .get_or_init(|| self.compute_analysis())
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn step(&self) -> Result<usize> {
        Ok(self.analyze()?.step)
    }

    fn compute_analysis(&self) -> Result<AlgebraAnalysis> {
        let n = self.dim;
        let t = &self.q_table;
        let mut chain = vec![(0..n).map(|i| unit(n, i)).collect::<Vec<_>>()];
        loop {
            let prev = chain.last().unwrap();
            if prev.is_empty() {
                break;
            }
            let mut gens = Vec::new();
            for i in 0..n {
                for c in prev {
                    let b = t.bracket(&unit(n, i), c);
                    if !is_zero_vec(&b) {
                        gens.push(b);
                    }
                }
            }
            let next = span_basis(n, &gens);
            if next.len() == prev.len() {
                return Err(Error::NotNilpotent {
                    stalled_at: next.len(),
                });
            }
            chain.push(next);
        }
        let step = chain.len() - 1;

        let mut rows = Vec::with_capacity(n * n);
        for i in 0..n {
            let ad = t.ad(&unit(n, i));
            rows.extend(ad.to_rows());
        }
        let center = null_space(&Matrix::from_rows(rows)?);
        let center = span_basis(n, &center);

        let complemented = if step >= 3 {
            chain[1].clone()
        } else {
            center.clone()
        };
        let v_complement = orthogonal_complement(&self.metric, &complemented);
        let proj_v = orthogonal_projector(&self.metric, &v_complement);
        let proj_complemented = orthogonal_projector(&self.metric, &complemented);
        Ok(AlgebraAnalysis {
            step,
            center_basis: center,
            commutator_chain: chain,
            v_complement,
            complemented,
            proj_v,
            proj_complemented,
        })
    }

    pub fn is_central(&self, z: &[Q]) -> bool {
        (0..self.dim).all(|i| is_zero_vec(&self.q_table.bracket(&unit(self.dim, i), z)))
    }

    /// `j(z)` as an `n×n` matrix that vanishes on 𝔷 and maps 𝔳 to 𝔳.
    pub fn j_map(&self, z: &[Q]) -> Result<Matrix<Q>> {
        self.check_len(z)?;
        let an = self.analyze()?;
        if an.step != 2 {
            return Err(Error::StepMismatch {
                required: "2".into(),
                actual: an.step,
            });
        }
        if !self.is_central(z) {
            return Err(Error::NotCentral);
        }
        let n = self.dim;
        let cols: Vec<Vec<Q>> = (0..n)
            .map(|j| {
                let v = an.proj_v.mul_vec(&unit(n, j));
                j_apply(&self.q_table, &an.proj_v, z, &v)
            })
            .collect();
        Ok(Matrix::from_columns(n, &cols))
    }

    /// Abelian extension `ℝᵏ ⊕ self`, the new basis vectors appended as `A1..Ak`.
    pub fn abelian_extension(&self, k: usize, name: impl Into<String>) -> Result<Self> {
        let n = self.dim + k;
        let mut metric = Matrix::identity(n);
        for i in 0..self.dim {
            for j in 0..self.dim {
                metric[(i, j)] = self.metric[(i, j)].clone();
            }
        }
        let ext = LieAlgebra::new(
            name,
            n,
            &self.bracket_entries(),
            Some(metric),
            self.params.clone(),
        )?;
        let mut labels = self.labels.clone();
        labels.extend((1..=k).map(|i| format!("A{i}")));
        ext.with_labels(labels)
    }
}

/// `j(Z)V = P_𝔳 ad^τ(V) Z`.
pub fn j_apply<T: Scalar>(s: &Structure<T>, proj_v: &Matrix<T>, z: &[T], v: &[T]) -> Vec<T> {
    proj_v.mul_vec(&s.ad_transpose_apply(v, z))
}

fn convert_structure<T: Scalar>(s: &Structure<Q>) -> Structure<T> {
    Structure {
        n: s.n,
        consts: s
            .consts
            .iter()
            .map(|(i, j, k, c)| (*i, *j, *k, T::from_rational(c)))
            .collect(),
        gram: s.gram.map(T::from_rational),
        gram_inv: s.gram_inv.map(T::from_rational),
        orthonormal: s.orthonormal,
    }
}

/// Convenience: 1-based integer-coefficient bracket list.
pub fn int_brackets(entries: &[(usize, usize, usize, i64)]) -> Vec<(usize, usize, usize, Q)> {
    entries
        .iter()
        .map(|&(i, j, k, c)| (i, j, k, crate::scalar::q(c)))
        .collect()
}
