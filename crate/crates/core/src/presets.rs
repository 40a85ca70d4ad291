//! Bundled presets: the three characterised tubes, their laser recipes and
//! the UHMWPE tendon.

use crate::geometry::TubeSpec;
use crate::kinematics::TendonSpec;
use crate::toolpath::LaserRecipe;

pub const TUBE1_JSON: &str = include_str!("../presets/tube1.json");
pub const TUBE2_JSON: &str = include_str!("../presets/tube2.json");
pub const TUBE3_JSON: &str = include_str!("../presets/tube3.json");
pub const RECIPE_TUBE1_JSON: &str = include_str!("../presets/recipe_tube1.json");
pub const RECIPE_TUBE2_JSON: &str = include_str!("../presets/recipe_tube2.json");
pub const RECIPE_TUBE3_JSON: &str = include_str!("../presets/recipe_tube3.json");
pub const TENDON_JSON: &str = include_str!("../presets/tendon.json");

/// Maximum actuation stroke used when characterising each tube, mm.
pub const MAX_STROKE_MM: [f64; 3] = [2.0, 2.5, 5.0];

fn index(k: usize) -> usize {
    assert!(
        (1..=3).contains(&k),
        "preset tubes are numbered 1..=3, got {k}"
    );
    k - 1
}

/// Preset tube `k` (1, 2 or 3).
pub fn tube(k: usize) -> TubeSpec {
    let text = [TUBE1_JSON, TUBE2_JSON, TUBE3_JSON][index(k)];
    TubeSpec::from_json(text).expect("bundled tube preset parses")
}

/// Laser recipe for preset tube `k`.
pub fn recipe(k: usize) -> LaserRecipe {
    let text = [RECIPE_TUBE1_JSON, RECIPE_TUBE2_JSON, RECIPE_TUBE3_JSON][index(k)];
    LaserRecipe::from_json(text).expect("bundled recipe preset parses")
}

pub fn tendon() -> TendonSpec {
    TendonSpec::from_json(TENDON_JSON).expect("bundled tendon preset parses")
}

pub fn max_stroke(k: usize) -> f64 {
    MAX_STROKE_MM[index(k)]
}
