//! Category-path similarity between items and against a user's profile.
//!
//! cargo run --example category_similarity

use longtail::eval::{category_similarity, read_ontology, user_item_similarity, CategoryPath};

fn main() -> longtail::Result<()> {
    let mining: CategoryPath =
        "Book: Computer & Internet: Database: Data Mining and Data Warehouse: Introduction to Data Mining".parse()?;
    let storage: CategoryPath =
        "Book: Computer & Internet: Database: Data Management: Information Storage and Management".parse()?;
    let film: CategoryPath = "Movie: Drama: Crime".parse()?;
    println!("mining vs storage: {}", category_similarity(&mining, &storage));
    println!("mining vs itself:  {}", category_similarity(&mining, &mining));
    println!("mining vs film:    {}", category_similarity(&mining, &film));

    let ontology = read_ontology(
        "dm\tBook: Computer & Internet: Database: Data Mining and Data Warehouse: Introduction to Data Mining\n\
         ism\tBook: Computer & Internet: Database: Data Management: Information Storage and Management\n\
         sicp\tBook: Computer & Internet: Programming: Lisp\n\
         heat\tMovie: Drama: Crime\n"
            .as_bytes(),
    )?;
    let profile = ["sicp", "heat"];
    for item in ["dm", "ism", "heat"] {
        let s = user_item_similarity("reader", item, profile, &ontology)?;
        println!("reader (sicp, heat) vs {item}: {s:.3}");
    }
    Ok(())
}
