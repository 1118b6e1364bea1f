//! Global grid storage, reflective walls, and the READ/WRITE strip steps.
//!
//! Storage is four variable planes (density, x-momentum, y-momentum, total
//! energy) of `(nx + 4) x (ny + 4)` scalars, row-major within each plane.
//! Logical indices run from `-1` to `nx + 2` (resp. `ny + 2`); the interior
//! is `1..=nx` by `1..=ny`. The index `i` selects a grid row, so a *column*
//! strip (fixed `j`, varying `i`) is strided in memory while a *row* strip is
//! contiguous.

use std::fmt;
use std::marker::PhantomData;
use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::kernel::{cell_time_bound, StateStrip, GHOST};
use crate::state::{ConservedState, GasModel};

/// Sweep direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    /// Strips are columns: fixed `j`, varying `i`; x-momentum is normal.
    Column,
    /// Strips are rows: fixed `i`, varying `j`; y-momentum is normal.
    Row,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::Column => Axis::Row,
            Axis::Row => Axis::Column,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Column => "column",
            Axis::Row => "row",
        })
    }
}

/// Number of conserved variables (and storage planes).
pub const NVAR: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    data: Vec<f64>,
}

impl Grid2D {
    /// A grid whose interior is filled with `state` (x-momentum in `mom_a`).
    /// Ghost cells start zeroed and become valid after [`apply_boundary`].
    ///
    /// [`apply_boundary`]: Grid2D::apply_boundary
    pub fn uniform(nx: usize, ny: usize, dx: f64, dy: f64, state: ConservedState) -> Result<Self> {
        Self::from_fn(nx, ny, dx, dy, |_, _| state)
    }

    /// A grid whose interior cell `(i, j)` (1-based) is `f(i, j)`.
    pub fn from_fn(
        nx: usize,
        ny: usize,
        dx: f64,
        dy: f64,
        mut f: impl FnMut(usize, usize) -> ConservedState,
    ) -> Result<Self> {
        if nx < 4 || ny < 4 {
            return Err(Error::Domain(format!("grid extents must be >= 4, got {nx}x{ny}")));
        }
        if !(dx > 0.0 && dy > 0.0) {
            return Err(Error::Domain(format!("cell sizes must be positive, got {dx}, {dy}")));
        }
        let plane = (nx + 4) * (ny + 4);
        let mut grid = Grid2D {
            nx,
            ny,
            dx,
            dy,
            data: vec![0.0; NVAR * plane],
        };
        for i in 1..=nx {
            for j in 1..=ny {
                grid.set_cell(i as isize, j as isize, f(i, j))?;
            }
        }
        Ok(grid)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    /// Raw storage, planes back to back.
    pub fn raw(&self) -> &[f64] {
        &self.data
    }

    /// Interior extent along the strip direction of `axis`.
    pub fn len_along(&self, axis: Axis) -> usize {
        match axis {
            Axis::Column => self.nx,
            Axis::Row => self.ny,
        }
    }

    /// Cell width along `axis`.
    pub fn width_along(&self, axis: Axis) -> f64 {
        match axis {
            Axis::Column => self.dx,
            Axis::Row => self.dy,
        }
    }

    fn in_storage(&self, i: isize, j: isize) -> bool {
        (-1..=self.nx as isize + 2).contains(&i) && (-1..=self.ny as isize + 2).contains(&j)
    }

    /// Cell at logical `(i, j)`, ghosts included. Momentum is in the grid
    /// frame: `mom_a` is x, `mom_b` is y.
    pub fn cell(&self, i: isize, j: isize) -> Result<ConservedState> {
        if !self.in_storage(i, j) {
            return Err(Error::Index(format!("cell ({i}, {j}) outside storage")));
        }
        // SAFETY: bounds checked, shared borrow excludes writers.
        Ok(unsafe { self.view_ref().cell(i, j) })
    }

    pub fn set_cell(&mut self, i: isize, j: isize, u: ConservedState) -> Result<()> {
        if !self.in_storage(i, j) {
            return Err(Error::Index(format!("cell ({i}, {j}) outside storage")));
        }
        // SAFETY: bounds checked, exclusive borrow.
        unsafe { self.view().set_cell(i, j, u) };
        Ok(())
    }

    /// Iterator over interior cells in `(i, j, state)` form, `i` outermost.
    pub fn interior(&self) -> impl Iterator<Item = (usize, usize, ConservedState)> + '_ {
        let view = self.view_ref();
        (1..=self.nx).flat_map(move |i| {
            // SAFETY: interior indices are in storage; `self` is borrowed.
            (1..=self.ny).map(move |j| (i, j, unsafe { view.cell(i as isize, j as isize) }))
        })
    }

    /// Reflective walls on all four sides. Corner ghosts are never read and
    /// are left untouched.
    pub fn apply_boundary(&mut self) {
        // SAFETY: exclusive borrow.
        unsafe { self.view().apply_boundary() }
    }

    pub fn read_strip(&self, axis: Axis, index: usize, lo: usize, hi: usize) -> Result<StateStrip> {
        self.check_strip(axis, index, lo, hi)?;
        let mut cells = Vec::with_capacity(hi - lo + 1 + 2 * GHOST);
        // SAFETY: range checked, shared borrow.
        unsafe { self.view_ref().read_strip_into(axis, index, lo, hi, &mut cells) };
        Ok(StateStrip {
            cells,
            dx: self.width_along(axis),
        })
    }

    /// Overwrites interior cells `lo..=hi` of strip `index` from the interior
    /// of `strip`. Nothing is written unless every incoming cell is valid.
    pub fn write_strip(&mut self, axis: Axis, index: usize, lo: usize, hi: usize, strip: &StateStrip) -> Result<()> {
        self.check_strip(axis, index, lo, hi)?;
        if strip.n() != hi - lo + 1 {
            return Err(Error::LengthMismatch {
                expected: hi - lo + 1,
                actual: strip.n(),
            });
        }
        for u in strip.interior() {
            u.validate()?;
        }
        // SAFETY: range checked, exclusive borrow.
        unsafe { self.view().write_strip(axis, index, lo, strip) };
        Ok(())
    }

    pub(crate) fn check_strip(&self, axis: Axis, index: usize, lo: usize, hi: usize) -> Result<()> {
        let (len, across) = match axis {
            Axis::Column => (self.nx, self.ny),
            Axis::Row => (self.ny, self.nx),
        };
        if index < 1 || index > across {
            return Err(Error::Index(format!("{axis} strip {index} outside 1..={across}")));
        }
        if lo < 1 || hi > len || lo > hi {
            return Err(Error::Index(format!("{axis} strip range {lo}..={hi} outside 1..={len}")));
        }
        Ok(())
    }

    /// CFL time step over the whole interior.
    pub fn compute_dt(&self, model: GasModel) -> Result<f64> {
        let bound = self.time_bound(1..=self.nx, 1..=self.ny, model)?;
        bound
            .map(|b| model.cfl * b)
            .ok_or_else(|| Error::Domain("empty interior".into()))
    }

    /// Minimum over the given interior block of `min(dx, dy) / (max|v| + c)`,
    /// `None` if the block is empty. Combining blocks with `min` reproduces
    /// the whole-grid value bit for bit.
    pub fn time_bound(
        &self,
        is: RangeInclusive<usize>,
        js: RangeInclusive<usize>,
        model: GasModel,
    ) -> Result<Option<f64>> {
        // SAFETY: shared borrow.
        unsafe { self.view_ref().time_bound(is, js, model) }
    }

    pub(crate) fn view(&mut self) -> GridView<'_> {
        GridView {
            ptr: self.data.as_mut_ptr(),
            nx: self.nx,
            ny: self.ny,
            dx: self.dx,
            dy: self.dy,
            _grid: PhantomData,
        }
    }

    /// Read-only use of a view: callers must not invoke writing methods.
    pub(crate) fn view_ref(&self) -> GridView<'_> {
        GridView {
            ptr: self.data.as_ptr() as *mut f64,
            nx: self.nx,
            ny: self.ny,
            dx: self.dx,
            dy: self.dy,
            _grid: PhantomData,
        }
    }
}

/// Unsynchronized shared view of a grid used by the parallel strategies.
///
/// Every method is `unsafe`: callers must guarantee that no cell is written
/// while another thread reads or writes it, except across a
/// happens-before edge (barrier, release/acquire counter, task completion).
/// Index arguments must lie inside the storage.
#[derive(Clone, Copy)]
pub(crate) struct GridView<'a> {
    ptr: *mut f64,
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    _grid: PhantomData<&'a mut Grid2D>,
}

// SAFETY: access discipline is delegated to the unsafe methods' contracts.
unsafe impl Send for GridView<'_> {}
unsafe impl Sync for GridView<'_> {}

impl GridView<'_> {
    pub fn width_along(&self, axis: Axis) -> f64 {
        match axis {
            Axis::Column => self.dx,
            Axis::Row => self.dy,
        }
    }

    #[inline]
    fn plane(&self) -> usize {
        (self.nx + 4) * (self.ny + 4)
    }

    #[inline]
    fn idx(&self, i: isize, j: isize) -> usize {
        (i + 1) as usize * (self.ny + 4) + (j + 1) as usize
    }

    /// Storage offset of the cell at strip position `k` of strip `index`.
    #[inline]
    fn strip_idx(&self, axis: Axis, index: usize, k: isize) -> usize {
        match axis {
            Axis::Column => self.idx(k, index as isize),
            Axis::Row => self.idx(index as isize, k),
        }
    }

    #[inline]
    pub unsafe fn cell(&self, i: isize, j: isize) -> ConservedState {
        self.load(self.idx(i, j))
    }

    #[inline]
    pub unsafe fn set_cell(&self, i: isize, j: isize, u: ConservedState) {
        self.store(self.idx(i, j), u)
    }

    #[inline]
    unsafe fn load(&self, at: usize) -> ConservedState {
        let p = self.plane();
        ConservedState::new(
            *self.ptr.add(at),
            *self.ptr.add(at + p),
            *self.ptr.add(at + 2 * p),
            *self.ptr.add(at + 3 * p),
        )
    }

    #[inline]
    unsafe fn store(&self, at: usize, u: ConservedState) {
        let p = self.plane();
        *self.ptr.add(at) = u.rho;
        *self.ptr.add(at + p) = u.mom_a;
        *self.ptr.add(at + 2 * p) = u.mom_b;
        *self.ptr.add(at + 3 * p) = u.ener;
    }

    /// Cell at strip position `k`, in the sweep frame of `axis`.
    #[inline]
    pub unsafe fn strip_cell(&self, axis: Axis, index: usize, k: isize) -> ConservedState {
        let u = self.load(self.strip_idx(axis, index, k));
        match axis {
            Axis::Column => u,
            Axis::Row => u.swapped(),
        }
    }

    /// Appends cells `lo-2..=hi+2` of strip `index` (sweep frame) to `out`.
    pub unsafe fn read_strip_into(&self, axis: Axis, index: usize, lo: usize, hi: usize, out: &mut Vec<ConservedState>) {
        out.clear();
        let (lo, hi) = (lo as isize, hi as isize);
        out.extend((lo - GHOST as isize..=hi + GHOST as isize).map(|k| self.strip_cell(axis, index, k)));
    }

    /// Writes the interior of `strip` to cells `lo..` of strip `index`.
    pub unsafe fn write_strip(&self, axis: Axis, index: usize, lo: usize, strip: &StateStrip) {
        for (k, u) in strip.interior().iter().enumerate() {
            let u = match axis {
                Axis::Column => *u,
                Axis::Row => u.swapped(),
            };
            self.store(self.strip_idx(axis, index, (lo + k) as isize), u);
        }
    }

    pub unsafe fn apply_boundary(&self) {
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        let flip_x = |u: ConservedState| ConservedState { mom_a: -u.mom_a, ..u };
        let flip_y = |u: ConservedState| ConservedState { mom_b: -u.mom_b, ..u };
        for j in 1..=ny {
            self.set_cell(0, j, flip_x(self.cell(1, j)));
            self.set_cell(-1, j, flip_x(self.cell(2, j)));
            self.set_cell(nx + 1, j, flip_x(self.cell(nx, j)));
            self.set_cell(nx + 2, j, flip_x(self.cell(nx - 1, j)));
        }
        for i in 1..=nx {
            self.set_cell(i, 0, flip_y(self.cell(i, 1)));
            self.set_cell(i, -1, flip_y(self.cell(i, 2)));
            self.set_cell(i, ny + 1, flip_y(self.cell(i, ny)));
            self.set_cell(i, ny + 2, flip_y(self.cell(i, ny - 1)));
        }
    }

    pub unsafe fn time_bound(
        &self,
        is: RangeInclusive<usize>,
        js: RangeInclusive<usize>,
        model: GasModel,
    ) -> Result<Option<f64>> {
        let width = self.dx.min(self.dy);
        let mut bound: Option<f64> = None;
        for i in is {
            for j in js.clone() {
                let b = cell_time_bound(&self.cell(i as isize, j as isize), width, model)?;
                bound = Some(bound.map_or(b, |m| m.min(b)));
            }
        }
        Ok(bound)
    }
}
