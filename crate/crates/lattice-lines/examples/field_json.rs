//! Field and decomposition documents: export, re-import, verify.

use lattice_lines::bl::{
    decompose, decomposition_to_json, field_from_json, field_to_json, flow_from_boundary,
    sample_reversible_geometric, FlowField, RectDomain,
};
use lattice_lines::rng::SeededStream;

fn main() {
    let domain = RectDomain::new(3, 3).unwrap();
    let mut stream = SeededStream::new(112, 0);
    let (boundary, births) = sample_reversible_geometric(domain, 0.5, 0.5, &mut stream).unwrap();
    let field = flow_from_boundary(&births, &boundary).unwrap();

    let doc = field_to_json(&field);
    let text = serde_json::to_string_pretty(&doc).unwrap();
    println!("field document ({} edges):", doc.edges.len());
    for line in text.lines().take(14) {
        println!("  {line}");
    }
    println!("  ...");

    let parsed = serde_json::from_str(&text).unwrap();
    let back: FlowField<u64> = field_from_json(&parsed).unwrap();
    println!("re-import equals the original: {}", back == field);

    let dec = decompose(&field).unwrap();
    let dec_doc = decomposition_to_json(&dec);
    println!(
        "decomposition document: {} lines, schema {}",
        dec_doc.lines.len(),
        dec_doc.schema
    );

    let dir = std::env::temp_dir();
    let path = dir.join("lattice-lines-field.json");
    std::fs::write(&path, &text).unwrap();
    println!("wrote {}", path.display());
}
