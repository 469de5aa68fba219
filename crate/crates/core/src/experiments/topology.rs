use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Topological type of a compact surface with boundary. `genus` is the
/// orientable genus, or the number of cross-caps if non-orientable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttachmentResult {
    pub orientable: bool,
    pub genus: usize,
    pub boundary_components: usize,
}

impl AttachmentResult {
    pub fn euler_characteristic(&self) -> i64 {
        let (g, k) = (self.genus as i64, self.boundary_components as i64);
        if self.orientable {
            2 - 2 * g - k
        } else {
            2 - g - k
        }
    }
}

impl fmt::Display for AttachmentResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = if self.orientable { "orientable" } else { "non-orientable" };
        write!(f, "{o} genus={} k={}", self.genus, self.boundary_components)
    }
}

/// Type of the surface after attaching a band to a surface of the given
/// type. For a non-orientable base the orientation flag is ignored.
pub fn topology_of_attachment(
    orientable: bool,
    genus: usize,
    k: usize,
    same_component: bool,
    reverse_orientation: bool,
) -> Result<AttachmentResult> {
    if k < 1 {
        return Err(invalid("surface must have at least one boundary component"));
    }
    if !same_component && k < 2 {
        return Err(invalid(format!("arcs on different components need k >= 2, got k = {k}")));
    }
    let r = |orientable, genus, boundary_components| AttachmentResult { orientable, genus, boundary_components };
    Ok(match (orientable, same_component, reverse_orientation) {
        (true, true, false) => r(true, genus, k + 1),
        (true, true, true) => r(false, 2 * genus + 1, k),
        (true, false, false) => r(true, genus + 1, k - 1),
        (true, false, true) => r(false, 2 * genus + 2, k - 1),
        (false, true, _) => r(false, genus, k + 1),
        (false, false, _) => r(false, genus + 1, k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table() {
        let t = |o, g, k, s, rev| topology_of_attachment(o, g, k, s, rev).unwrap().to_string();
        assert_eq!(t(true, 0, 1, true, false), "orientable genus=0 k=2");
        assert_eq!(t(true, 2, 1, true, true), "non-orientable genus=5 k=1");
        assert_eq!(t(true, 1, 3, false, false), "orientable genus=2 k=2");
        assert_eq!(t(true, 1, 3, false, true), "non-orientable genus=4 k=2");
        assert_eq!(t(false, 3, 2, true, true), "non-orientable genus=3 k=3");
        assert_eq!(t(false, 3, 2, false, false), "non-orientable genus=4 k=2");
    }

    #[test]
    fn orientable_rows_lose_one_from_euler_characteristic() {
        for (g, k) in [(0, 2), (1, 2), (2, 3)] {
            let before = AttachmentResult { orientable: true, genus: g, boundary_components: k };
            for (same, rev) in [(true, false), (true, true), (false, false), (false, true)] {
                let after = topology_of_attachment(true, g, k, same, rev).unwrap();
                assert_eq!(after.euler_characteristic(), before.euler_characteristic() - 1);
            }
        }
    }

    #[test]
    fn rejects_bad_k() {
        assert!(topology_of_attachment(true, 0, 1, false, false).is_err());
        assert!(topology_of_attachment(false, 1, 0, true, false).is_err());
    }
}
