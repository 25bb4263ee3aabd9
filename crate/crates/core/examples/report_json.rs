//! Full analysis of one field, written as JSON, CSV and a markdown verdict table.

use hstick::fields::{MultiQuadField, PlaceSet};
use hstick::report::{self, EmitFormat, RunConfig};

fn main() -> hstick::Result<()> {
    let field = MultiQuadField::parse("5,13")?;
    let r = report::analyze(&field, &PlaceSet::parse("")?, RunConfig::default())?;
    for w in &r.header.warnings {
        eprintln!("warning: {w}");
    }
    print!("{}", report::emit(&r, EmitFormat::Markdown)?);
    println!();
    print!("{}", report::emit(&r, EmitFormat::Csv)?);
    let json = report::emit(&r, EmitFormat::Json)?;
    assert_eq!(report::parse_report(&json)?, r);
    println!("\njson: {} bytes, exit code {}", json.len(), r.exit_code());
    Ok(())
}
