use crate::error::{Error, Result};
use crate::gauss_vector::LinalgReal;
use crate::validation::Violation;

/// Default alphabet cap per axis.
pub const DEFAULT_ALPHABET_CAP: usize = 6;
const NORMALIZATION_TOL: f64 = 1e-12;

/// Finite joint distribution of (X, Y) or (X, Y, Z), stored row-major with Z
/// fastest. A pmf without Z behaves as if Z were constant.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf<T> {
    probs: Vec<T>,
    nx: usize,
    ny: usize,
    nz: usize,
    has_z: bool,
    cap: usize,
}

fn shape_xy<T>(rows: &[Vec<T>]) -> std::result::Result<(usize, usize), String> {
    let ny = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || ny == 0 {
        return Err("empty table".into());
    }
    if let Some(i) = rows.iter().position(|r| r.len() != ny) {
        return Err(format!("row {i} has {} entries, expected {ny}", rows[i].len()));
    }
    Ok((rows.len(), ny))
}

impl<T: LinalgReal> JointPmf<T> {
    /// `rows[x][y] = P(x, y)`.
    pub fn from_xy(rows: Vec<Vec<T>>) -> Result<Self> {
        Self::from_xy_with_cap(rows, DEFAULT_ALPHABET_CAP)
    }

    pub fn from_xy_with_cap(rows: Vec<Vec<T>>, cap: usize) -> Result<Self> {
        let (nx, ny) = shape_xy(&rows).map_err(Error::InvalidPmf)?;
        let probs = rows.into_iter().flatten().collect();
        Self::from_flat(probs, nx, ny, 1, false, cap)
    }

    /// `cube[x][y][z] = P(x, y, z)`.
    pub fn from_xyz(cube: Vec<Vec<Vec<T>>>) -> Result<Self> {
        Self::from_xyz_with_cap(cube, DEFAULT_ALPHABET_CAP)
    }

    pub fn from_xyz_with_cap(cube: Vec<Vec<Vec<T>>>, cap: usize) -> Result<Self> {
        let (nx, ny) = shape_xy(&cube).map_err(Error::InvalidPmf)?;
        let nz = cube[0][0].len();
        for (x, plane) in cube.iter().enumerate() {
            if let Some(y) = plane.iter().position(|r| r.len() != nz) {
                return Err(Error::InvalidPmf(format!("entry [{x}][{y}] has {} values, expected {nz}", plane[y].len())));
            }
        }
        let probs = cube.into_iter().flatten().flatten().collect();
        Self::from_flat(probs, nx, ny, nz, true, cap)
    }

    fn from_flat(probs: Vec<T>, nx: usize, ny: usize, nz: usize, has_z: bool, cap: usize) -> Result<Self> {
        for size in [nx, ny, nz] {
            if size > cap {
                return Err(Error::AlphabetTooLarge { size, cap });
            }
        }
        if nz == 0 {
            return Err(Error::InvalidPmf("empty Z alphabet".into()));
        }
        let pmf = Self { probs, nx, ny, nz, has_z, cap };
        match pmf.audit().first() {
            Some(v) => Err(Error::InvalidPmf(v.to_string())),
            None => Ok(pmf),
        }
    }

    /// Every violation in a raw `P(x, y)` table, without building the pmf.
    pub fn audit_xy(rows: &[Vec<T>], cap: usize) -> Vec<Violation> {
        match shape_xy(rows) {
            Err(msg) => vec![Violation::new("pmf_xy", msg)],
            Ok((nx, ny)) => Self::audit_flat(rows.iter().flatten().copied().collect(), [nx, ny, 1], false, cap),
        }
    }

    /// Every violation in a raw `P(x, y, z)` table, without building the pmf.
    pub fn audit_xyz(cube: &[Vec<Vec<T>>], cap: usize) -> Vec<Violation> {
        let (nx, ny) = match shape_xy(cube) {
            Err(msg) => return vec![Violation::new("pmf_xyz", msg)],
            Ok(s) => s,
        };
        let nz = cube[0][0].len();
        for (x, plane) in cube.iter().enumerate() {
            if let Some(y) = plane.iter().position(|r| r.len() != nz) {
                return vec![Violation::new("pmf_xyz", format!("entry [{x}][{y}] has {} values, expected {nz}", plane[y].len()))];
            }
        }
        Self::audit_flat(cube.iter().flatten().flatten().copied().collect(), [nx, ny, nz], true, cap)
    }

    fn audit_flat(probs: Vec<T>, [nx, ny, nz]: [usize; 3], has_z: bool, cap: usize) -> Vec<Violation> {
        let name = if has_z { "pmf_xyz" } else { "pmf_xy" };
        let mut out = Vec::new();
        for (axis, size) in [("X", nx), ("Y", ny), ("Z", nz)] {
            if size > cap {
                out.push(Violation::new(name, format!("{axis} alphabet has {size} letters, cap is {cap}")));
            }
            if size == 0 {
                out.push(Violation::new(name, format!("{axis} alphabet is empty")));
            }
        }
        if nz > 0 {
            out.extend(Self { probs, nx, ny, nz, has_z, cap }.audit());
        }
        out
    }

    /// Entry nonnegativity and normalization problems.
    pub fn audit(&self) -> Vec<Violation> {
        let name = if self.has_z { "pmf_xyz" } else { "pmf_xy" };
        let mut out = Vec::new();
        for (k, &p) in self.probs.iter().enumerate() {
            if !(p.is_finite() && p >= T::zero()) {
                out.push(Violation::new(name, format!("entry {} is {p}, must be a finite nonnegative number", self.index_label(k))));
            }
        }
        let total = self.probs.iter().fold(T::zero(), |a, &p| a + p);
        let deficit = T::one() - total;
        if num_traits::Float::abs(deficit) > T::lit(NORMALIZATION_TOL) {
            out.push(Violation::new(
                name,
                format!("entries sum to {total}, normalization deficit {:.3e}", deficit.as_f64()),
            ));
        }
        out
    }

    fn index_label(&self, k: usize) -> String {
        let (x, rest) = (k / (self.ny * self.nz), k % (self.ny * self.nz));
        let (y, z) = (rest / self.nz, rest % self.nz);
        if self.has_z {
            format!("[{x}][{y}][{z}]")
        } else {
            format!("[{x}][{y}]")
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Z alphabet size; 1 when the pmf has no Z.
    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn has_z(&self) -> bool {
        self.has_z
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn p(&self, x: usize, y: usize, z: usize) -> T {
        self.probs[(x * self.ny + y) * self.nz + z]
    }

    pub fn marginal_x(&self) -> Vec<T> {
        (0..self.nx).map(|x| self.sum_where(|i, _, _| i == x)).collect()
    }

    pub fn marginal_y(&self) -> Vec<T> {
        (0..self.ny).map(|y| self.sum_where(|_, j, _| j == y)).collect()
    }

    pub fn marginal_z(&self) -> Vec<T> {
        (0..self.nz).map(|z| self.sum_where(|_, _, k| k == z)).collect()
    }

    fn sum_where(&self, keep: impl Fn(usize, usize, usize) -> bool) -> T {
        let mut acc = T::zero();
        for x in 0..self.nx {
            for y in 0..self.ny {
                for z in 0..self.nz {
                    if keep(x, y, z) {
                        acc += self.p(x, y, z);
                    }
                }
            }
        }
        acc
    }

    /// `P(x, y)` with Z summed out.
    pub fn xy_table(&self) -> Vec<Vec<T>> {
        (0..self.nx)
            .map(|x| (0..self.ny).map(|y| (0..self.nz).fold(T::zero(), |a, z| a + self.p(x, y, z))).collect())
            .collect()
    }

    /// `P(x, z)` with Y summed out.
    pub fn xz_table(&self) -> Vec<Vec<T>> {
        (0..self.nx)
            .map(|x| (0..self.nz).map(|z| (0..self.ny).fold(T::zero(), |a, y| a + self.p(x, y, z))).collect())
            .collect()
    }

    /// The (X, Y) marginal as a pmf without Z.
    pub fn xy_marginal(&self) -> Self {
        let probs = self.xy_table().into_iter().flatten().collect();
        Self { probs, nx: self.nx, ny: self.ny, nz: 1, has_z: false, cap: self.cap }
    }

    /// Reorder the alphabets: entry `(x, y, z)` moves to `(px[x], py[y], pz[z])`.
    pub fn relabeled(&self, px: &[usize], py: &[usize], pz: &[usize]) -> Result<Self> {
        let is_perm = |p: &[usize], n: usize| {
            let mut seen = vec![false; n];
            p.len() == n && p.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
        };
        if !(is_perm(px, self.nx) && is_perm(py, self.ny) && is_perm(pz, self.nz)) {
            return Err(Error::InvalidArgument("relabeling must be a permutation of each alphabet".into()));
        }
        let mut probs = vec![T::zero(); self.probs.len()];
        for x in 0..self.nx {
            for y in 0..self.ny {
                for z in 0..self.nz {
                    probs[(px[x] * self.ny + py[y]) * self.nz + pz[z]] = self.p(x, y, z);
                }
            }
        }
        Ok(Self { probs, ..self.clone() })
    }

    /// Pass Y through `channel[y][y']`; the result has output alphabet `channel[0].len()`.
    pub fn post_process_y(&self, channel: &[Vec<T>]) -> Result<Self> {
        if channel.len() != self.ny || channel.iter().any(|r| r.len() != channel[0].len()) {
            return Err(Error::DimensionMismatch("channel rows must match the Y alphabet".into()));
        }
        let ny2 = channel[0].len();
        let mut probs = vec![T::zero(); self.nx * ny2 * self.nz];
        for x in 0..self.nx {
            for (y, row) in channel.iter().enumerate() {
                for z in 0..self.nz {
                    for (y2, &w) in row.iter().enumerate() {
                        probs[(x * ny2 + y2) * self.nz + z] += self.p(x, y, z) * w;
                    }
                }
            }
        }
        Self::from_flat(probs, self.nx, ny2, self.nz, self.has_z, self.cap)
    }
}

/// Independent product of two sources: `((x_a, x_b), (y_a, y_b), (z_a, z_b))`
/// with `x = x_a * |X_b| + x_b`. A factor without Z contributes a constant Z.
///
/// Each product alphabet may hold up to `cap^2` letters.
pub fn tensor_product<T: LinalgReal>(a: &JointPmf<T>, b: &JointPmf<T>) -> Result<JointPmf<T>> {
    let cap = a.cap.max(b.cap);
    let guard = cap * cap;
    let (nx, ny, nz) = (a.nx * b.nx, a.ny * b.ny, a.nz * b.nz);
    for size in [nx, ny, nz] {
        if size > guard {
            return Err(Error::AlphabetTooLarge { size, cap: guard });
        }
    }
    let mut probs = Vec::with_capacity(nx * ny * nz);
    for xa in 0..a.nx {
        for xb in 0..b.nx {
            for ya in 0..a.ny {
                for yb in 0..b.ny {
                    for za in 0..a.nz {
                        for zb in 0..b.nz {
                            probs.push(a.p(xa, ya, za) * b.p(xb, yb, zb));
                        }
                    }
                }
            }
        }
    }
    let pmf = JointPmf { probs, nx, ny, nz, has_z: a.has_z || b.has_z, cap: guard };
    Ok(pmf)
}
