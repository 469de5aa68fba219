mod common;

use common::{base_with_arcs, glued};
use steklov_core::experiments::topology_of_attachment;
use steklov_core::mesh::{glue, BoundaryArc, GlueSpec, Mesh, RECT_REGION, SEAM_SET};
use steklov_core::Error;

#[test]
fn boundary_length_bookkeeping() {
    for (same, eps, h) in [(true, 0.2, 1.0), (true, 0.3, 2.5), (false, 0.2, 3.0)] {
        let (base, g) = glued(eps, h, same, false);
        let want = base.boundary_length() - 2.0 * eps * eps + 2.0 * eps * h;
        assert!((g.boundary_length() - want).abs() < 1e-12, "{} vs {want}", g.boundary_length());
    }
}

#[test]
fn euler_characteristic_drops_by_one() {
    for same in [true, false] {
        for rev in [false, true] {
            let (base, g) = glued(0.2, 1.5, same, rev);
            assert_eq!(g.topology().euler_characteristic, base.topology().euler_characteristic - 1);
        }
    }
}

#[test]
fn orientable_cases_match_the_table() {
    for same in [true, false] {
        for rev in [false, true] {
            let (base, g) = glued(0.2, 1.0, same, rev);
            let before = base.topology();
            let after = g.topology();
            let predicted = topology_of_attachment(
                before.orientable,
                before.genus as usize,
                before.boundary_components,
                same,
                rev,
            )
            .unwrap();
            assert_eq!(after.orientable, predicted.orientable, "same={same} rev={rev}");
            assert_eq!(after.genus, predicted.genus as i64, "same={same} rev={rev}");
            assert_eq!(after.boundary_components, predicted.boundary_components);
            assert_eq!(g.chains().len(), predicted.boundary_components);
            assert_eq!(after.euler_characteristic, predicted.euler_characteristic());
        }
    }
}

#[test]
fn seam_and_regions() {
    let (base, g) = glued(0.2, 1.0, true, false);
    let seam = g.vertex_set(SEAM_SET).unwrap();
    assert_eq!(seam.len(), 10);
    assert!(seam.iter().all(|&v| v < base.n_vertices()));
    let rect = (0..g.triangles().len()).filter(|&t| g.region_of(t) == RECT_REGION).count();
    assert_eq!(rect, 2 * 4 * 24);
    assert!(g.has_label("free_left") && g.has_label("free_right"));
    assert!(!g.has_label("I_bottom") && !g.has_label("I_top"));
    // seam edges are interior after glueing
    for w in seam.windows(2) {
        assert!(g.label_of(w[0], w[1]).is_none());
    }
}

#[test]
fn glued_mesh_round_trips_through_text() {
    let (_, g) = glued(0.3, 2.0, true, true);
    let back = Mesh::from_text(&g.to_text()).unwrap();
    assert_eq!(back.to_text(), g.to_text());
    assert_eq!(back.metadata_hash(), g.metadata_hash());
    assert_eq!(back.topology(), g.topology());
}

#[test]
fn glue_errors() {
    let (base, a1, a2) = base_with_arcs(0.2, true, 4);
    let spec = GlueSpec { epsilon: 0.2, h: 1.0, arc1: a1, arc2: a2, reverse_orientation: false, nx: 4, ny: 8 };
    assert!(matches!(glue(&base, &GlueSpec { arc2: a1, ..spec }), Err(Error::InvalidArgument(_))));
    assert!(matches!(glue(&base, &GlueSpec { nx: 3, ..spec }), Err(Error::GlueMismatch(_))));
    let short = BoundaryArc { s1: a1.s1 - 1e-3, ..a1 };
    assert!(matches!(glue(&base, &GlueSpec { arc1: short, ..spec }), Err(Error::GlueMismatch(_))));
    assert!(matches!(glue(&base, &GlueSpec { h: -1.0, ..spec }), Err(Error::InvalidArgument(_))));
    let g = glue(&base, &spec).unwrap();
    assert!(glue(&g, &spec).is_err());
}
