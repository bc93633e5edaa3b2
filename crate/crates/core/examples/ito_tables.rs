//! Derive the standard, conversion and birth-death Itô tables from commutators.

use rdito::algebra::table_for;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for names in [&["Lambda", "A", "Adag", "dt"][..], &["M", "Lambda"], &["X", "Y"]] {
        println!("# {}", names.join(" "));
        print!("{}", table_for(names)?.to_text());
        println!();
    }
    Ok(())
}
