//! The chapters of the guide in `book/src`, included verbatim so that
//! `cargo test -p goebel-book` runs every Rust snippet in them.

macro_rules! chapter {
    ($name:ident, $file:literal) => {
        #[doc = include_str!(concat!("../../../book/src/", $file))]
        pub mod $name {}
    };
}

chapter!(introduction, "introduction.md");
chapter!(exact, "exact.md");
chapter!(residues, "residues.md");
chapter!(periodicity, "periodicity.md");
chapter!(finding_nk, "finding-nk.md");
chapter!(theorem, "theorem.md");
chapter!(variants, "variants.md");
chapter!(cli, "cli.md");
