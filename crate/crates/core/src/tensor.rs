//! Dense row-major tensors and matrices, and a small tensor-network
//! contractor.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("shape {shape:?} needs {expected} entries, got {got}")]
    DataLength {
        shape: Vec<usize>,
        expected: usize,
        got: usize,
    },
    #[error("expected shape {expected:?}, got {got:?}")]
    Mismatch { expected: Vec<usize>, got: Vec<usize> },
}

/// Row-major dense tensor; the leftmost index varies slowest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self, ShapeError> {
        let expected: usize = shape.iter().product();
        if expected != data.len() {
            return Err(ShapeError::DataLength {
                shape,
                expected,
                got: data.len(),
            });
        }
        Ok(Tensor { shape, data })
    }

    pub fn scalar(v: f64) -> Self {
        Tensor {
            shape: vec![],
            data: vec![v],
        }
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let n = shape.iter().product();
        Tensor {
            shape,
            data: vec![0.0; n],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.data[offset(&self.shape, index)]
    }

    /// Reinterpret with a new shape of equal size.
    pub fn reshape(self, shape: Vec<usize>) -> Result<Self, ShapeError> {
        Tensor::new(shape, self.data)
    }
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

fn offset(shape: &[usize], index: &[usize]) -> usize {
    strides(shape).iter().zip(index).map(|(s, i)| s * i).sum()
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, ShapeError> {
        if rows * cols != data.len() {
            return Err(ShapeError::DataLength {
                shape: vec![rows, cols],
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Matrix::new(rows.len(), cols, data).expect("ragged rows")
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix { rows: n, cols: n, data }
    }

    /// The permutation taking `x ⊗ y` to `y ⊗ x` for `x` of dimension `a`
    /// and `y` of dimension `b`.
    pub fn swap(a: usize, b: usize) -> Self {
        let n = a * b;
        let mut data = vec![0.0; n * n];
        for x in 0..a {
            for y in 0..b {
                let col = x * b + y;
                let row = y * a + x;
                data[row * n + col] = 1.0;
            }
        }
        Matrix { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    /// `self · rhs`.
    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix, ShapeError> {
        if self.cols != rhs.rows {
            return Err(ShapeError::Mismatch {
                expected: vec![self.cols],
                got: vec![rhs.rows],
            });
        }
        let mut out = vec![0.0; self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(Matrix {
            rows: self.rows,
            cols: rhs.cols,
            data: out,
        })
    }

    /// Kronecker product, `self` on the slow index.
    pub fn kron(&self, rhs: &Matrix) -> Matrix {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut data = vec![0.0; rows * cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        data[(i * rhs.rows + k) * cols + j * rhs.cols + l] = a * rhs.get(k, l);
                    }
                }
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.get(r, c)).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        max_abs_diff(&self.data, &other.data)
    }

    pub fn into_tensor(self, shape: Vec<usize>) -> Result<Tensor, ShapeError> {
        Tensor::new(shape, self.data)
    }
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// A tensor network: each factor lists one index variable per tensor axis
/// (repeats allowed, meaning a diagonal), and the output lists the
/// variables indexing the result (repeats mean a delta, variables absent
/// from every factor are free).
#[derive(Clone, Debug, Default)]
pub struct Network<'a> {
    dims: Vec<usize>,
    factors: Vec<(Vec<usize>, &'a Tensor)>,
    output: Vec<usize>,
}

/// Intermediate factor over distinct variables.
struct Factor {
    vars: Vec<usize>,
    data: Vec<f64>,
}

impl<'a> Network<'a> {
    pub fn new() -> Self {
        Network::default()
    }

    pub fn var(&mut self, dim: usize) -> usize {
        self.dims.push(dim);
        self.dims.len() - 1
    }

    pub fn factor(&mut self, vars: Vec<usize>, t: &'a Tensor) -> Result<(), ShapeError> {
        let expected: Vec<usize> = vars.iter().map(|&v| self.dims[v]).collect();
        if expected != t.shape() {
            return Err(ShapeError::Mismatch {
                expected,
                got: t.shape().to_vec(),
            });
        }
        self.factors.push((vars, t));
        Ok(())
    }

    pub fn output(&mut self, vars: Vec<usize>) {
        self.output = vars;
    }

    pub fn contract(&self) -> Tensor {
        let mut factors: Vec<Factor> = self
            .factors
            .iter()
            .map(|(vars, t)| self.diagonal(vars, t))
            .collect();

        let out_vars: BTreeSet<usize> = self.output.iter().copied().collect();
        while factors.len() > 1 {
            let mut best = (usize::MAX, 0, 1);
            for i in 0..factors.len() {
                for j in i + 1..factors.len() {
                    let cost = self.size(&union(&factors[i].vars, &factors[j].vars));
                    if cost < best.0 {
                        best = (cost, i, j);
                    }
                }
            }
            let (_, i, j) = best;
            let b = factors.swap_remove(j);
            let a = factors.swap_remove(i);
            let keep: Vec<usize> = union(&a.vars, &b.vars)
                .into_iter()
                .filter(|v| out_vars.contains(v) || factors.iter().any(|f| f.vars.contains(v)))
                .collect();
            factors.push(self.pair(&a, &b, keep));
        }
        let last = factors.pop().unwrap_or(Factor {
            vars: vec![],
            data: vec![1.0],
        });
        let keep: Vec<usize> = last.vars.iter().copied().filter(|v| out_vars.contains(v)).collect();
        let last = self.sum_to(&last, keep);

        let out_shape: Vec<usize> = self.output.iter().map(|&v| self.dims[v]).collect();
        let mut result = Tensor::zeros(out_shape.clone());
        let last_shape: Vec<usize> = last.vars.iter().map(|&v| self.dims[v]).collect();
        let last_strides = strides(&last_shape);
        let mut value_of = vec![usize::MAX; self.dims.len()];
        for_each_index(&out_shape, |k, idx| {
            for v in value_of.iter_mut() {
                *v = usize::MAX;
            }
            for (&var, &x) in self.output.iter().zip(idx) {
                if value_of[var] != usize::MAX && value_of[var] != x {
                    return;
                }
                value_of[var] = x;
            }
            let off: usize = last
                .vars
                .iter()
                .enumerate()
                .map(|(p, &v)| last_strides[p] * value_of[v])
                .sum();
            result.data[k] = last.data[off];
        });
        result
    }

    fn size(&self, vars: &[usize]) -> usize {
        vars.iter().map(|&v| self.dims[v]).product()
    }

    fn diagonal(&self, vars: &[usize], t: &Tensor) -> Factor {
        let uniq: Vec<usize> = dedup(vars);
        if uniq.len() == vars.len() {
            return Factor {
                vars: uniq,
                data: t.data().to_vec(),
            };
        }
        let shape: Vec<usize> = uniq.iter().map(|&v| self.dims[v]).collect();
        let src_strides = strides(t.shape());
        let pos: Vec<usize> = vars.iter().map(|v| uniq.iter().position(|u| u == v).unwrap()).collect();
        let mut data = vec![0.0; shape.iter().product()];
        for_each_index(&shape, |k, idx| {
            let off: usize = pos.iter().zip(&src_strides).map(|(&p, s)| s * idx[p]).sum();
            data[k] = t.data()[off];
        });
        Factor { vars: uniq, data }
    }

    fn pair(&self, a: &Factor, b: &Factor, keep: Vec<usize>) -> Factor {
        let all = union(&a.vars, &b.vars);
        let shape: Vec<usize> = all.iter().map(|&v| self.dims[v]).collect();
        let a_str = self.strides_in(&a.vars, &all);
        let b_str = self.strides_in(&b.vars, &all);
        let k_str = self.strides_in(&keep, &all);
        let mut data = vec![0.0; self.size(&keep)];
        for_each_index(&shape, |_, idx| {
            let mut ao = 0;
            let mut bo = 0;
            let mut ko = 0;
            for (i, &x) in idx.iter().enumerate() {
                ao += a_str[i] * x;
                bo += b_str[i] * x;
                ko += k_str[i] * x;
            }
            data[ko] += a.data[ao] * b.data[bo];
        });
        Factor { vars: keep, data }
    }

    fn sum_to(&self, f: &Factor, keep: Vec<usize>) -> Factor {
        if keep.len() == f.vars.len() {
            return Factor {
                vars: f.vars.clone(),
                data: f.data.clone(),
            };
        }
        let shape: Vec<usize> = f.vars.iter().map(|&v| self.dims[v]).collect();
        let k_str = self.strides_in(&keep, &f.vars);
        let mut data = vec![0.0; self.size(&keep)];
        for_each_index(&shape, |k, idx| {
            let ko: usize = idx.iter().zip(&k_str).map(|(x, s)| x * s).sum();
            data[ko] += f.data[k];
        });
        Factor { vars: keep, data }
    }

    /// For each variable of `frame`, its stride within a row-major tensor
    /// over `sub` (zero if absent).
    fn strides_in(&self, sub: &[usize], frame: &[usize]) -> Vec<usize> {
        let shape: Vec<usize> = sub.iter().map(|&v| self.dims[v]).collect();
        let st = strides(&shape);
        frame
            .iter()
            .map(|v| sub.iter().position(|u| u == v).map_or(0, |p| st[p]))
            .collect()
    }
}

fn dedup(vars: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(vars.len());
    for &v in vars {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = a.to_vec();
    for &v in b {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Visit every multi-index of `shape` in row-major order with its linear
/// position.
fn for_each_index(shape: &[usize], mut f: impl FnMut(usize, &[usize])) {
    if shape.contains(&0) {
        return;
    }
    let mut idx = vec![0usize; shape.len()];
    let total: usize = shape.iter().product();
    for k in 0..total {
        f(k, &idx);
        for axis in (0..shape.len()).rev() {
            idx[axis] += 1;
            if idx[axis] < shape[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_matrix_exchanges_factors() {
        let p = Matrix::swap(2, 3);
        let x = Matrix::new(2, 1, vec![1.0, 2.0]).unwrap();
        let y = Matrix::new(3, 1, vec![3.0, 4.0, 5.0]).unwrap();
        let lhs = p.matmul(&x.kron(&y)).unwrap();
        assert_eq!(lhs, y.kron(&x));
    }

    #[test]
    fn contraction_matches_loops() {
        let t = Tensor::new(vec![2, 3], vec![1., 2., 3., 4., 5., 6.]).unwrap();
        let s = Tensor::new(vec![3], vec![1., 0., 2.]).unwrap();
        let mut net = Network::new();
        let i = net.var(2);
        let j = net.var(3);
        net.factor(vec![i, j], &t).unwrap();
        net.factor(vec![j], &s).unwrap();
        net.output(vec![i]);
        assert_eq!(net.contract().data(), &[7.0, 16.0]);
    }

    #[test]
    fn trace_via_repeated_index() {
        let m = Tensor::new(vec![3, 3], vec![1., 2., 3., 4., 5., 6., 7., 8., 9.]).unwrap();
        let mut net = Network::new();
        let i = net.var(3);
        net.factor(vec![i, i], &m).unwrap();
        assert_eq!(net.contract().data(), &[15.0]);
    }

    #[test]
    fn repeated_output_is_delta() {
        let mut net = Network::new();
        let i = net.var(2);
        net.output(vec![i, i]);
        assert_eq!(net.contract().data(), &[1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn free_output_broadcasts() {
        let s = Tensor::new(vec![2], vec![0.25, 0.75]).unwrap();
        let mut net = Network::new();
        let i = net.var(2);
        let j = net.var(3);
        net.factor(vec![i], &s).unwrap();
        net.output(vec![j]);
        assert_eq!(net.contract().data(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn shape_checked() {
        let s = Tensor::new(vec![2], vec![0.0, 1.0]).unwrap();
        let mut net = Network::new();
        let i = net.var(3);
        assert!(net.factor(vec![i], &s).is_err());
        assert!(Tensor::new(vec![2, 2], vec![1.0]).is_err());
    }
}
