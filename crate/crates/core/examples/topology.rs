//! Compiles a communication graph into an axiom schema and probes which processes can talk.
use lampar::programs::observed_edges;
use lampar::syntax::parse_topology;
use lampar::topology::{extract_axiom, schema_to_graph};

fn main() -> lampar::Result<()> {
    let src = "nodes 4\nedge 1 2\nedge 2 1\nedge 1 3\nedge 2 3\nedge 4 1\n";
    let file = parse_topology(src)?;
    for n in &file.notices {
        println!("note: {n}");
    }
    let schema = extract_axiom(&file.graph)?;
    println!("{}", schema.notation());
    println!("header: {}", schema.header_snippet());
    println!("round trip ok: {}", schema_to_graph(&schema) == file.graph);
    for (from, to) in observed_edges(&file.graph)? {
        println!("process {from} delivered to process {to}");
    }
    Ok(())
}
