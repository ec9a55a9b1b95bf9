//! Type-checks a few programs and shows the diagnostic for an ill-typed one.
use lampar::prims::Registry;
use lampar::syntax::{parse_program, render_snippet};
use lampar::typecheck::check_program;

fn main() -> lampar::Result<()> {
    let reg = Registry::profile("bool", None)?;
    let sources = [
        "var f : A -> B; var x : A; f x",
        "var x : Bool; var s : Bool; nu a : {1: Bool ~ []; 2: Bool ~ [1]} . (a! s).0 || (a? x).0",
        "var f : A -> B; var y : B; f y",
        "var s : A; nu a : {1: A ~ []; 2: A ~ [1]} . (nu b : {1: A ~ []; 2: A ~ [1]} . (b! s).0 || (b? s).0) || (a? s).0",
    ];
    for src in sources {
        let parsed = parse_program(src, &reg)?;
        match check_program(&parsed.term) {
            Ok(ty) => println!("{src}\n  : {ty}"),
            Err(d) => {
                let span = parsed.spans.locate(&parsed.term, &d.path);
                println!("{}", render_snippet(src, span, &d.to_string()));
            }
        }
    }
    Ok(())
}
