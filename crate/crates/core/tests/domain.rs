use hydro_tasks::oracle::conservation_totals;
use hydro_tasks::{
    assemble_strip_from_interfaces, extract_interface, prim_to_cons, run_sequential, Axis, ConservedState,
    DomainDecomposition, GasModel, Grid2D, PrimitiveState, StateStrip,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_grid(nx: usize, ny: usize, seed: u64) -> Grid2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = Grid2D::from_fn(nx, ny, 0.1, 0.1, |_, _| {
        let w = PrimitiveState::new(
            rng.random_range(0.5..2.0),
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
            rng.random_range(0.5..2.0),
        );
        prim_to_cons(w, GasModel::default()).unwrap()
    })
    .unwrap();
    grid.apply_boundary();
    grid
}

fn cell_bits(u: &ConservedState) -> [u64; 4] {
    u.to_array().map(f64::to_bits)
}

fn strip_bits(s: &StateStrip) -> Vec<[u64; 4]> {
    s.cells.iter().map(cell_bits).collect()
}

#[test]
fn assembled_strips_equal_global_reads() {
    let grid = random_grid(16, 16, 1);
    for (p_rows, p_cols) in [(1, 1), (2, 2), (4, 2), (2, 4), (8, 8)] {
        let decomp = DomainDecomposition::for_grid(&grid, p_rows, p_cols).unwrap();
        for axis in [Axis::Column, Axis::Row] {
            for ((i, j), sub) in decomp.iter() {
                let lo_iface = decomp
                    .prev_along(axis, i, j)
                    .map(|(a, b)| extract_interface(&grid, &decomp, a, b, axis).unwrap());
                let hi_iface = decomp
                    .next_along(axis, i, j)
                    .map(|_| extract_interface(&grid, &decomp, i, j, axis).unwrap());
                let (lo, hi) = sub.along(axis);
                let (first, last) = sub.across(axis);
                for index in first..=last {
                    let assembled = assemble_strip_from_interfaces(
                        &grid,
                        &decomp,
                        i,
                        j,
                        axis,
                        index,
                        lo_iface.as_ref(),
                        hi_iface.as_ref(),
                    )
                    .unwrap();
                    let direct = grid.read_strip(axis, index, lo, hi).unwrap();
                    assert_eq!(
                        strip_bits(&assembled),
                        strip_bits(&direct),
                        "{p_rows}x{p_cols} ({i}, {j}) {axis} strip {index}"
                    );
                }
            }
        }
    }
}

#[test]
fn interfaces_hold_the_facing_ghost_slots() {
    let grid = random_grid(16, 16, 2);
    let decomp = DomainDecomposition::for_grid(&grid, 2, 2).unwrap();
    for axis in [Axis::Column, Axis::Row] {
        for (i, j) in decomp.interface_owners(axis) {
            let buf = extract_interface(&grid, &decomp, i, j, axis).unwrap();
            let (a, b) = decomp.next_along(axis, i, j).unwrap();
            let (near, far) = (decomp.sub(i, j), decomp.sub(a, b));
            assert_eq!(buf.extent(), near.across(axis).1 - near.across(axis).0 + 1);
            for index in buf.first_strip()..buf.first_strip() + buf.extent() {
                let lower = grid.read_strip(axis, index, near.along(axis).0, near.along(axis).1).unwrap();
                let upper = grid.read_strip(axis, index, far.along(axis).0, far.along(axis).1).unwrap();
                let n = lower.cells.len();
                let expected = [&upper.cells[0], &upper.cells[1], &lower.cells[n - 2], &lower.cells[n - 1]];
                for (layer, want) in expected.into_iter().enumerate() {
                    assert_eq!(cell_bits(&buf.get(layer, index)), cell_bits(want), "{axis} ({i}, {j}) layer {layer}");
                }
            }
        }
    }
}

#[test]
fn interface_needs_a_neighbor() {
    let grid = random_grid(16, 16, 3);
    let decomp = DomainDecomposition::for_grid(&grid, 2, 2).unwrap();
    let err = extract_interface(&grid, &decomp, 1, 0, Axis::Column).unwrap_err();
    assert_eq!(err.category(), "decomposition");
    let err = assemble_strip_from_interfaces(&grid, &decomp, 0, 0, Axis::Column, 1, None, None).unwrap_err();
    assert_eq!(err.category(), "decomposition");
}

#[test]
fn decompositions_tile_the_interior() {
    for (nx, ny) in [(10, 10), (16, 9), (37, 50), (64, 64)] {
        for p_rows in 1..=nx / 2 {
            for p_cols in [1, 2, 3, ny / 2] {
                let d = DomainDecomposition::new(nx, ny, p_rows, p_cols).unwrap();
                let mut owner = vec![0u32; nx * ny];
                for (_, s) in d.iter() {
                    assert!(s.imax - s.imin >= 1 && s.jmax - s.jmin >= 1);
                    for i in s.imin..=s.imax {
                        for j in s.jmin..=s.jmax {
                            owner[(i - 1) * ny + (j - 1)] += 1;
                        }
                    }
                }
                assert!(owner.iter().all(|&c| c == 1), "{nx}x{ny} by {p_rows}x{p_cols}");
            }
        }
    }
    assert!(DomainDecomposition::new(10, 10, 6, 1).is_err());
}

#[test]
fn strip_write_touches_only_its_strip() {
    let grid = random_grid(12, 9, 4);
    for axis in [Axis::Column, Axis::Row] {
        let mut copy = grid.clone();
        let strip = copy.read_strip(axis, 3, 1, grid.len_along(axis)).unwrap();
        copy.write_strip(axis, 3, 1, grid.len_along(axis), &strip).unwrap();
        assert_eq!(copy.raw(), grid.raw());

        let mut doubled = strip.clone();
        for u in doubled.interior_mut() {
            u.rho *= 2.0;
            u.ener *= 2.0;
        }
        copy.write_strip(axis, 3, 1, grid.len_along(axis), &doubled).unwrap();
        for (i, j, u) in copy.interior() {
            let on_strip = match axis {
                Axis::Column => j == 3,
                Axis::Row => i == 3,
            };
            let old = grid.cell(i as isize, j as isize).unwrap();
            assert_eq!(on_strip, cell_bits(&u) != cell_bits(&old), "({i}, {j})");
        }
    }
}

#[test]
fn invalid_strip_is_rejected_before_writing() {
    let mut grid = random_grid(8, 8, 5);
    let before = grid.clone();
    let mut strip = grid.read_strip(Axis::Column, 2, 1, 8).unwrap();
    strip.interior_mut()[5].rho = -1.0;
    assert_eq!(grid.write_strip(Axis::Column, 2, 1, 8, &strip).unwrap_err().category(), "positivity");
    assert_eq!(grid.raw(), before.raw());
    let short = grid.read_strip(Axis::Column, 2, 1, 6).unwrap();
    assert_eq!(grid.write_strip(Axis::Column, 2, 1, 8, &short).unwrap_err().category(), "domain");
}

#[test]
fn boundary_fill_is_idempotent_and_spares_the_interior() {
    let mut grid = random_grid(9, 7, 6);
    let once = grid.clone();
    grid.apply_boundary();
    assert_eq!(grid.raw(), once.raw());
    let interior: Vec<_> = once.interior().map(|(_, _, u)| cell_bits(&u)).collect();
    let again: Vec<_> = grid.interior().map(|(_, _, u)| cell_bits(&u)).collect();
    assert_eq!(interior, again);
}

#[test]
fn walls_conserve_mass_and_energy() {
    let model = GasModel::default();
    let mut grid = random_grid(24, 18, 7);
    let start = conservation_totals(&grid);
    for _ in 0..20 {
        run_sequential(&mut grid, model, 1).unwrap();
        let t = conservation_totals(&grid);
        assert!(((t.mass - start.mass) / start.mass).abs() <= 1e-11);
        assert!(((t.energy - start.energy) / start.energy).abs() <= 1e-11);
    }
}
