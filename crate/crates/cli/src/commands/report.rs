//! `report`: gathers every Markdown table present in the output directory into one
//! document.

use anyhow::Result;

use crate::output::{Manifest, OutDir};

/// Report sections in reading order.
pub const SECTIONS: [&str; 11] = [
    "ingest_summary",
    "annotation_agreement",
    "metric_growth",
    "label_shift",
    "uptake_share",
    "teacher_effort",
    "regression",
    "quartile_spearman_teacher",
    "quartile_spearman_llm",
    "calibration_emotion",
    "calibration_moral",
];

pub fn run(out: &OutDir, m: &mut Manifest) -> Result<()> {
    let mut doc = String::from("# Revision analytics report\n");
    let mut found = 0;
    for name in SECTIONS {
        let p = out.path(&format!("{name}.md"));
        if p.exists() {
            doc.push('\n');
            doc.push_str(&std::fs::read_to_string(&p)?);
            found += 1;
        }
    }
    if found == 0 {
        m.error("no report tables found; run the analysis commands first");
    }
    out.write(m, "report.md", doc)
}
