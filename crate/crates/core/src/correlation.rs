//! Pairwise correlation estimators and correlation-matrix estimation.
//!
//! The rank estimators (Spearman's rho, Kendall's tau) depend on the data only
//! through ranks and are turned into estimates of the latent Gaussian
//! correlation by the sine transforms [`sine_spearman`] and [`sine_kendall`].
//! Ties are rejected rather than averaged.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// `n x p` table of finite observations, stored by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    n: usize,
    columns: Vec<Vec<T>>,
    names: Vec<String>,
}

impl<T: Scalar> Dataset<T> {
    /// Columns must share a length `n >= 2` and hold finite values only.
    pub fn from_columns(columns: Vec<Vec<T>>) -> Result<Self> {
        let names = (0..columns.len()).map(|j| format!("X{j}")).collect();
        Self::with_names(columns, names)
    }

    pub fn with_names(columns: Vec<Vec<T>>, names: Vec<String>) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        if let Some(c) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::LengthMismatch(n, c.len()));
        }
        if !columns.is_empty() && n < 2 {
            return Err(Error::TooFewObservations { need: 2, got: n });
        }
        if columns.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if names.len() != columns.len() {
            return Err(Error::LengthMismatch(columns.len(), names.len()));
        }
        Ok(Self { n, columns, names })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != p) {
            return Err(Error::LengthMismatch(p, r.len()));
        }
        let columns = (0..p).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        Self::from_columns(columns)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<T>] {
        &self.columns
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Applies `f` to every entry of every column.
    pub fn map(&self, mut f: impl FnMut(usize, T) -> T) -> Result<Self> {
        let columns = self
            .columns
            .iter()
            .enumerate()
            .map(|(j, c)| c.iter().map(|&x| f(j, x)).collect())
            .collect();
        Self::with_names(columns, self.names.clone())
    }

    /// Reads a CSV file with a header row and one observation per line.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let names: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let mut columns: Vec<Vec<T>> = vec![Vec::new(); names.len()];
        for rec in rdr.records() {
            let rec = rec?;
            for (j, field) in rec.iter().enumerate() {
                let x: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::Csv(format!("bad number {field:?} in column {j}")))?;
                columns[j].push(T::of(x));
            }
        }
        Self::with_names(columns, names)
    }

    /// Writes the dataset as CSV. Values use the shortest representation that
    /// round-trips, so writes are byte-reproducible.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.names)?;
        for i in 0..self.n {
            w.write_record(self.columns.iter().map(|c| c[i].to_string()))?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CorrelationMethod {
    Pearson,
    Spearman,
    Kendall,
}

impl CorrelationMethod {
    pub const ALL: [CorrelationMethod; 3] = [Self::Pearson, Self::Spearman, Self::Kendall];

    pub fn is_rank_based(self) -> bool {
        !matches!(self, Self::Pearson)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pearson => "pearson",
            Self::Spearman => "spearman",
            Self::Kendall => "kendall",
        }
    }
}

impl fmt::Display for CorrelationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for CorrelationMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pearson" => Ok(Self::Pearson),
            "spearman" => Ok(Self::Spearman),
            "kendall" => Ok(Self::Kendall),
            other => Err(format!("unknown correlation method {other:?}")),
        }
    }
}

/// Symmetric matrix with unit diagonal and entries in `[-1, 1]`.
///
/// Positive definiteness is not checked here; estimated matrices may lack it
/// and consumers find out when they factorize.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix<T> {
    inner: Matrix<T>,
}

impl<T: Scalar> CorrelationMatrix<T> {
    pub fn identity(p: usize) -> Self {
        Self {
            inner: Matrix::identity(p),
        }
    }

    /// Validates symmetry, unit diagonal and range up to `1e-10`.
    pub fn new(m: Matrix<T>) -> Result<Self> {
        let tol = T::of(1e-10);
        let p = m.dim();
        for i in 0..p {
            if (m[(i, i)] - T::one()).abs() > tol {
                return Err(Error::InvalidCorrelation(format!(
                    "diagonal entry {i} is {}",
                    m[(i, i)]
                )));
            }
            for j in 0..p {
                let x = m[(i, j)];
                if !x.is_finite() || x.abs() > T::one() + tol {
                    return Err(Error::InvalidCorrelation(format!("entry ({i}, {j}) is {x}")));
                }
                if (x - m[(j, i)]).abs() > tol {
                    return Err(Error::InvalidCorrelation(format!(
                        "entries ({i}, {j}) and ({j}, {i}) differ"
                    )));
                }
            }
        }
        Ok(Self { inner: m })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows))
    }

    /// Normalizes a covariance matrix: `S_ij / sqrt(S_ii S_jj)`.
    pub fn from_covariance(cov: &Matrix<T>) -> Result<Self> {
        let p = cov.dim();
        if (0..p).any(|i| !(cov[(i, i)] > T::zero())) {
            return Err(Error::ZeroVariance);
        }
        let m = Matrix::from_fn(p, |i, j| {
            if i == j {
                T::one()
            } else {
                let r = cov[(i, j)] / (cov[(i, i)] * cov[(j, j)]).sqrt();
                r.max(-T::one()).min(T::one())
            }
        });
        Self::new(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> T {
        self.inner[(u, v)]
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.inner
    }

    pub fn principal(&self, indices: &[usize]) -> Matrix<T> {
        self.inner.principal(indices)
    }

    /// Correlation submatrix on `indices`.
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        Self {
            inner: self.inner.principal(indices),
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let p = self.dim();
        w.write_record((0..p).map(|j| format!("X{j}")))?;
        for i in 0..p {
            w.write_record(self.inner.row(i).iter().map(|x| x.to_string()))?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }
}

fn argsort<T: Scalar>(column: &[T]) -> Result<Vec<usize>> {
    if column.iter().any(|x| x.is_nan()) {
        return Err(Error::NonFinite);
    }
    let mut idx: Vec<usize> = (0..column.len()).collect();
    idx.sort_unstable_by(|&a, &b| column[a].partial_cmp(&column[b]).unwrap());
    if let Some(w) = idx.windows(2).find(|w| column[w[0]] == column[w[1]]) {
        return Err(Error::Tie {
            value: column[w[0]].to_f64_lossy(),
        });
    }
    Ok(idx)
}

/// Ranks `1..=n` (1 = smallest). Errors on ties.
pub fn ranks<T: Scalar>(column: &[T]) -> Result<Vec<usize>> {
    let order = argsort(column)?;
    let mut r = vec![0; column.len()];
    for (pos, &i) in order.iter().enumerate() {
        r[i] = pos + 1;
    }
    Ok(r)
}

fn check_pair<T>(x: &[T], y: &[T]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::TooFewObservations { need: 2, got: x.len() });
    }
    Ok(x.len())
}

/// `(numerator, denominator)` of `1 - 6 sum d^2 / (n (n^2 - 1))` as integers.
fn spearman_parts(rx: &[usize], ry: &[usize]) -> (i128, i128) {
    let n = rx.len() as i128;
    let sum_d2: i128 = rx
        .iter()
        .zip(ry)
        .map(|(&a, &b)| {
            let d = a as i128 - b as i128;
            d * d
        })
        .sum();
    let denom = n * (n * n - 1);
    (denom - 6 * sum_d2, denom)
}

/// Spearman's rho from two rank vectors (each a permutation of `1..=n`).
pub fn spearman_from_ranks<T: Scalar>(rx: &[usize], ry: &[usize]) -> T {
    let (num, den) = spearman_parts(rx, ry);
    T::of(num as f64) / T::of(den as f64)
}

/// Spearman's rank correlation, `O(n log n)`.
pub fn spearman_rho<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    check_pair(x, y)?;
    Ok(spearman_from_ranks(&ranks(x)?, &ranks(y)?))
}

/// Spearman's rho as an exact rational.
pub fn spearman_rho_exact<T: Scalar>(x: &[T], y: &[T]) -> Result<Ratio<i128>> {
    check_pair(x, y)?;
    let (num, den) = spearman_parts(&ranks(x)?, &ranks(y)?);
    Ok(Ratio::new(num, den))
}

/// Counts pairs `i < j` with `seq[i] > seq[j]`, sorting `seq` in the process.
pub fn count_inversions(seq: &mut [usize]) -> u64 {
    let mut buf = seq.to_vec();
    merge_count(seq, &mut buf)
}

fn merge_count(a: &mut [usize], buf: &mut [usize]) -> u64 {
    let n = a.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = {
        let (l, r) = a.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(l, bl) + merge_count(r, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if a[i] <= a[j] {
            buf[k] = a[i];
            i += 1;
        } else {
            buf[k] = a[j];
            j += 1;
            // every remaining element of the left half exceeds a[j]
            inv += (mid - i) as u64;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&a[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&a[j..n]);
    a.copy_from_slice(&buf[..n]);
    inv
}

/// Sum over `i < j` of `sign(x_i - x_j) sign(y_i - y_j)`, given the order of
/// `x` and the ranks of `y`.
fn kendall_sum(order_x: &[usize], ranks_y: &[usize]) -> i128 {
    let n = order_x.len() as i128;
    let mut seq: Vec<usize> = order_x.iter().map(|&i| ranks_y[i]).collect();
    let discordant = count_inversions(&mut seq) as i128;
    n * (n - 1) / 2 - 2 * discordant
}

/// `2 S / (n (n - 1))` for a concordance sum `S`.
pub fn kendall_from_sum<T: Scalar>(sum: i128, n: usize) -> T {
    let n = n as i128;
    T::of((2 * sum) as f64) / T::of((n * (n - 1)) as f64)
}

/// Kendall's tau by merge-sort discordant-pair counting, `O(n log n)`.
pub fn kendall_tau<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    let n = check_pair(x, y)?;
    let s = kendall_sum(&argsort(x)?, &ranks(y)?);
    Ok(kendall_from_sum(s, n))
}

/// Kendall's tau as an exact rational.
pub fn kendall_tau_exact<T: Scalar>(x: &[T], y: &[T]) -> Result<Ratio<i128>> {
    let n = check_pair(x, y)? as i128;
    let s = kendall_sum(&argsort(x)?, &ranks(y)?);
    Ok(Ratio::new(2 * s, n * (n - 1)))
}

fn check_unit<T: Scalar>(r: T) -> Result<()> {
    if r.is_nan() || r.abs() > T::one() {
        return Err(Error::Domain {
            value: r.to_f64_lossy(),
            domain: "[-1, 1]",
        });
    }
    Ok(())
}

fn clamp_unit<T: Scalar>(r: T) -> T {
    r.max(-T::one()).min(T::one())
}

/// `2 sin(pi rho / 6)`: Spearman's rho to a latent Pearson correlation.
pub fn sine_spearman<T: Scalar>(rho_s: T) -> Result<T> {
    check_unit(rho_s)?;
    // 2 sin(pi/6) rounds to 1 - 2^-53; keep the endpoints exact
    if rho_s.abs() == T::one() {
        return Ok(rho_s);
    }
    Ok(clamp_unit(T::of(2.0) * (T::PI() * rho_s / T::of(6.0)).sin()))
}

/// `sin(pi tau / 2)`: Kendall's tau to a latent Pearson correlation.
pub fn sine_kendall<T: Scalar>(tau: T) -> Result<T> {
    check_unit(tau)?;
    Ok(clamp_unit((T::FRAC_PI_2() * tau).sin()))
}

/// Sample (Pearson) correlation, clamped to `[-1, 1]`.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    let n = check_pair(x, y)?;
    let nn = T::of_usize(n);
    let mx = x.iter().copied().sum::<T>() / nn;
    let my = y.iter().copied().sum::<T>() / nn;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == T::zero() || syy == T::zero() {
        return Err(Error::ZeroVariance);
    }
    Ok(clamp_unit(sxy / (sxx * syy).sqrt()))
}

/// Plug-in correlation matrix: the method's pairwise estimate for every pair
/// of columns, sine-transformed for the rank methods.
///
/// Ranks and sort orders are computed once per column, so the cost is
/// `O(p n log n + p^2 n)` for Spearman and `O(p^2 n log n)` for Kendall.
pub fn estimate_correlation_matrix<T: Scalar>(
    data: &Dataset<T>,
    method: CorrelationMethod,
) -> Result<CorrelationMatrix<T>> {
    let p = data.p();
    let mut m = Matrix::identity(p);
    let pair_err = |u: usize, v: usize, e: &Error| Error::ColumnPair(u, v, Box::new(e.clone()));
    match method {
        CorrelationMethod::Pearson => {
            for u in 0..p {
                for v in (u + 1)..p {
                    let r = pearson(data.column(u), data.column(v))
                        .map_err(|e| pair_err(u, v, &e))?;
                    m[(u, v)] = r;
                    m[(v, u)] = r;
                }
            }
        }
        CorrelationMethod::Spearman | CorrelationMethod::Kendall => {
            let orders: Vec<Result<Vec<usize>>> = data.columns().iter().map(|c| argsort(c)).collect();
            let rank_of = |order: &[usize]| {
                let mut r = vec![0; order.len()];
                for (pos, &i) in order.iter().enumerate() {
                    r[i] = pos + 1;
                }
                r
            };
            let rank_vecs: Vec<Option<Vec<usize>>> = orders
                .iter()
                .map(|o| o.as_ref().ok().map(|o| rank_of(o)))
                .collect();
            for u in 0..p {
                for v in (u + 1)..p {
                    let (ou, rv) = match (&orders[u], &orders[v]) {
                        (Err(e), _) | (_, Err(e)) => return Err(pair_err(u, v, e)),
                        (Ok(ou), Ok(_)) => (ou, rank_vecs[v].as_ref().unwrap()),
                    };
                    let r = if method == CorrelationMethod::Spearman {
                        let ru = rank_vecs[u].as_ref().unwrap();
                        sine_spearman(spearman_from_ranks::<T>(ru, rv))
                    } else {
                        sine_kendall(kendall_from_sum::<T>(kendall_sum(ou, rv), data.n()))
                    }
                    .map_err(|e| pair_err(u, v, &e))?;
                    m[(u, v)] = r;
                    m[(v, u)] = r;
                }
            }
        }
    }
    CorrelationMatrix::new(m)
}
