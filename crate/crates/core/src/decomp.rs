//! Rectangular domain decomposition and the interface buffers shared by
//! neighboring subdomains.
//!
//! Subdomain coordinates are 0-based: `(i, j)` is the subdomain in
//! decomposition row `i` (splitting the grid's `i` axis) and decomposition
//! column `j`. The interface `(i, j)` of a column sweep sits between
//! subdomains `(i, j)` and `(i + 1, j)` and holds grid rows
//! `imax - 1 ..= imax + 2` across the columns of subdomain `(i, j)`: the two
//! boundary layers each side reads from the other under a five-point stencil.

use crate::error::{Error, Result};
use crate::grid::{Axis, Grid2D, GridView};
use crate::kernel::{StateStrip, GHOST};
use crate::state::ConservedState;

/// Interior extents of one subdomain (1-based grid indices, inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subdomain {
    pub imin: usize,
    pub imax: usize,
    pub jmin: usize,
    pub jmax: usize,
    /// Subdomain `(i - 1, j)` exists.
    pub up: bool,
    /// Subdomain `(i + 1, j)` exists.
    pub down: bool,
    /// Subdomain `(i, j - 1)` exists.
    pub left: bool,
    /// Subdomain `(i, j + 1)` exists.
    pub right: bool,
}

impl Subdomain {
    /// Strip-direction range `(lo, hi)` for sweeps along `axis`.
    pub fn along(&self, axis: Axis) -> (usize, usize) {
        match axis {
            Axis::Column => (self.imin, self.imax),
            Axis::Row => (self.jmin, self.jmax),
        }
    }

    /// Range of strip indices this subdomain owns for sweeps along `axis`.
    pub fn across(&self, axis: Axis) -> (usize, usize) {
        match axis {
            Axis::Column => (self.jmin, self.jmax),
            Axis::Row => (self.imin, self.imax),
        }
    }

    /// Whether the subdomain has a neighbor before / after it along `axis`.
    pub fn has_neighbors(&self, axis: Axis) -> (bool, bool) {
        match axis {
            Axis::Column => (self.up, self.down),
            Axis::Row => (self.left, self.right),
        }
    }

    pub fn cells(&self) -> usize {
        (self.imax - self.imin + 1) * (self.jmax - self.jmin + 1)
    }
}

/// The table of subdomain extents and neighbor links.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainDecomposition {
    nx: usize,
    ny: usize,
    p_rows: usize,
    p_cols: usize,
    entries: Vec<Subdomain>,
}

/// Near-even 1-based split of `1..=n` into `p` ranges; the first `n % p`
/// ranges are one cell longer.
pub(crate) fn split(n: usize, p: usize) -> Vec<(usize, usize)> {
    let (base, extra) = (n / p, n % p);
    let mut lo = 1;
    (0..p)
        .map(|k| {
            let len = base + usize::from(k < extra);
            let range = (lo, lo + len - 1);
            lo += len;
            range
        })
        .collect()
}

impl DomainDecomposition {
    /// Splits an `nx` x `ny` interior into `p_rows` x `p_cols` subdomains of
    /// at least two cells per direction.
    pub fn new(nx: usize, ny: usize, p_rows: usize, p_cols: usize) -> Result<Self> {
        if p_rows == 0 || p_cols == 0 {
            return Err(Error::Decomposition("need at least one subdomain per axis".into()));
        }
        if 2 * p_rows > nx || 2 * p_cols > ny {
            return Err(Error::Decomposition(format!(
                "{p_rows}x{p_cols} subdomains leave fewer than 2 cells per direction on a {nx}x{ny} grid"
            )));
        }
        let rows = split(nx, p_rows);
        let cols = split(ny, p_cols);
        let mut entries = Vec::with_capacity(p_rows * p_cols);
        for (i, &(imin, imax)) in rows.iter().enumerate() {
            for (j, &(jmin, jmax)) in cols.iter().enumerate() {
                entries.push(Subdomain {
                    imin,
                    imax,
                    jmin,
                    jmax,
                    up: i > 0,
                    down: i + 1 < p_rows,
                    left: j > 0,
                    right: j + 1 < p_cols,
                });
            }
        }
        Ok(Self {
            nx,
            ny,
            p_rows,
            p_cols,
            entries,
        })
    }

    pub fn for_grid(grid: &Grid2D, p_rows: usize, p_cols: usize) -> Result<Self> {
        Self::new(grid.nx(), grid.ny(), p_rows, p_cols)
    }

    pub fn p_rows(&self) -> usize {
        self.p_rows
    }

    pub fn p_cols(&self) -> usize {
        self.p_cols
    }

    pub fn extents(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&Subdomain> {
        (i < self.p_rows && j < self.p_cols).then(|| &self.entries[i * self.p_cols + j])
    }

    /// Subdomain `(i, j)`; panics when out of range.
    pub fn sub(&self, i: usize, j: usize) -> &Subdomain {
        self.get(i, j).expect("subdomain coordinates out of range")
    }

    /// Row-major iterator over `((i, j), subdomain)`.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &Subdomain)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(k, s)| ((k / self.p_cols, k % self.p_cols), s))
    }

    /// Linear (worker) id of subdomain `(i, j)`.
    pub fn id(&self, i: usize, j: usize) -> usize {
        i * self.p_cols + j
    }

    /// Coordinates of the neighbor after `(i, j)` along `axis`.
    pub fn next_along(&self, axis: Axis, i: usize, j: usize) -> Option<(usize, usize)> {
        match axis {
            Axis::Column => (i + 1 < self.p_rows).then_some((i + 1, j)),
            Axis::Row => (j + 1 < self.p_cols).then_some((i, j + 1)),
        }
    }

    /// Coordinates of the neighbor before `(i, j)` along `axis`.
    pub fn prev_along(&self, axis: Axis, i: usize, j: usize) -> Option<(usize, usize)> {
        match axis {
            Axis::Column => (i > 0).then(|| (i - 1, j)),
            Axis::Row => (j > 0).then(|| (i, j - 1)),
        }
    }

    /// Owners `(i, j)` of every interface of a sweep along `axis`.
    pub fn interface_owners(&self, axis: Axis) -> Vec<(usize, usize)> {
        self.iter()
            .filter(|&((i, j), _)| self.next_along(axis, i, j).is_some())
            .map(|(ij, _)| ij)
            .collect()
    }
}

/// Copy of the four cell layers straddling the boundary between two
/// neighboring subdomains, stored in the sweep frame of `axis`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceBuffer {
    axis: Axis,
    owner: (usize, usize),
    /// First of the four layers, along the strip direction.
    layer_start: usize,
    /// First strip index covered.
    first: usize,
    extent: usize,
    cells: Vec<ConservedState>,
}

impl InterfaceBuffer {
    /// Zero-filled buffer for the interface owned by `(i, j)`.
    pub fn allocate(decomp: &DomainDecomposition, i: usize, j: usize, axis: Axis) -> Result<Self> {
        let sub = decomp
            .get(i, j)
            .ok_or_else(|| Error::Index(format!("no subdomain ({i}, {j})")))?;
        if decomp.next_along(axis, i, j).is_none() {
            return Err(Error::NoNeighbor { i, j, axis });
        }
        let (_, hi) = sub.along(axis);
        let (first, last) = sub.across(axis);
        let extent = last - first + 1;
        Ok(Self {
            axis,
            owner: (i, j),
            layer_start: hi - 1,
            first,
            extent,
            cells: vec![ConservedState::default(); 4 * extent],
        })
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn owner(&self) -> (usize, usize) {
        self.owner
    }

    /// Shared extent (number of strips the interface spans).
    pub fn extent(&self) -> usize {
        self.extent
    }

    /// Strip-direction position of the first layer.
    pub fn layer_start(&self) -> usize {
        self.layer_start
    }

    pub fn first_strip(&self) -> usize {
        self.first
    }

    pub fn bytes(&self) -> usize {
        self.cells.len() * std::mem::size_of::<ConservedState>()
    }

    /// Cell in `layer` (0..4) for strip `index`.
    pub fn get(&self, layer: usize, index: usize) -> ConservedState {
        self.cells[layer * self.extent + (index - self.first)]
    }

    /// Copies the current grid contents into the buffer.
    ///
    /// # Safety
    /// No thread may be writing the covered cells.
    pub(crate) unsafe fn fill_from(&mut self, view: &GridView<'_>) {
        for layer in 0..4 {
            let pos = (self.layer_start + layer) as isize;
            for t in 0..self.extent {
                self.cells[layer * self.extent + t] = view.strip_cell(self.axis, self.first + t, pos);
            }
        }
    }

    pub fn fill(&mut self, grid: &Grid2D) {
        // SAFETY: the shared borrow excludes writers; the view is only read.
        unsafe { self.fill_from(&grid.view_ref()) }
    }
}

/// Copies the interface shared by `(i, j)` and its successor along `axis`.
pub fn extract_interface(
    grid: &Grid2D,
    decomp: &DomainDecomposition,
    i: usize,
    j: usize,
    axis: Axis,
) -> Result<InterfaceBuffer> {
    check_shape(grid, decomp)?;
    let mut buf = InterfaceBuffer::allocate(decomp, i, j, axis)?;
    buf.fill(grid);
    Ok(buf)
}

fn check_shape(grid: &Grid2D, decomp: &DomainDecomposition) -> Result<()> {
    if decomp.extents() != (grid.nx(), grid.ny()) {
        return Err(Error::Decomposition(format!(
            "decomposition of {:?} applied to a {}x{} grid",
            decomp.extents(),
            grid.nx(),
            grid.ny()
        )));
    }
    Ok(())
}

/// Builds strip `index` of subdomain `(i, j)` for a sweep along `axis`:
/// interior from the grid, ghost cells from the interface buffers on sides
/// with a neighbor and from the grid's wall ghosts elsewhere.
#[allow(clippy::too_many_arguments)]
pub fn assemble_strip_from_interfaces(
    grid: &Grid2D,
    decomp: &DomainDecomposition,
    i: usize,
    j: usize,
    axis: Axis,
    index: usize,
    iface_lo: Option<&InterfaceBuffer>,
    iface_hi: Option<&InterfaceBuffer>,
) -> Result<StateStrip> {
    check_shape(grid, decomp)?;
    let sub = decomp
        .get(i, j)
        .ok_or_else(|| Error::Index(format!("no subdomain ({i}, {j})")))?;
    let (first, last) = sub.across(axis);
    if !(first..=last).contains(&index) {
        return Err(Error::Index(format!(
            "{axis} strip {index} outside subdomain ({i}, {j}) range {first}..={last}"
        )));
    }
    let (need_lo, need_hi) = sub.has_neighbors(axis);
    let check = |iface: Option<&InterfaceBuffer>, needed: bool, owner: Option<(usize, usize)>, side| match (needed, iface) {
        (true, None) => Err(Error::MissingInterface { i, j, axis, side }),
        (true, Some(b)) if b.axis != axis || Some(b.owner) != owner => Err(Error::Decomposition(format!(
            "{side} interface of ({i}, {j}) is owned by {:?} ({} sweep)",
            b.owner, b.axis
        ))),
        (false, Some(_)) => Err(Error::NoNeighbor { i, j, axis }),
        _ => Ok(()),
    };
    check(iface_lo, need_lo, decomp.prev_along(axis, i, j), "lower")?;
    check(iface_hi, need_hi, Some((i, j)), "upper")?;

    let mut cells = Vec::new();
    // SAFETY: shared borrow of the grid, read-only use.
    unsafe {
        assemble_into(&grid.view_ref(), sub, axis, index, iface_lo, iface_hi, &mut cells);
    }
    Ok(StateStrip {
        cells,
        dx: grid.width_along(axis),
    })
}

/// Unchecked strip assembly used by the task strategy.
///
/// # Safety
/// The subdomain's own cells in strip `index` must not be concurrently
/// written; wall ghosts must be stable.
pub(crate) unsafe fn assemble_into(
    view: &GridView<'_>,
    sub: &Subdomain,
    axis: Axis,
    index: usize,
    iface_lo: Option<&InterfaceBuffer>,
    iface_hi: Option<&InterfaceBuffer>,
    out: &mut Vec<ConservedState>,
) {
    let (lo, hi) = sub.along(axis);
    out.clear();
    for k in 0..GHOST {
        out.push(match iface_lo {
            // layers 0, 1 of the lower interface are the two cells before `lo`
            Some(b) => b.get(k, index),
            None => view.strip_cell(axis, index, lo as isize - GHOST as isize + k as isize),
        });
    }
    out.extend((lo..=hi).map(|k| view.strip_cell(axis, index, k as isize)));
    for k in 0..GHOST {
        out.push(match iface_hi {
            Some(b) => b.get(GHOST + k, index),
            None => view.strip_cell(axis, index, (hi + 1 + k) as isize),
        });
    }
}
