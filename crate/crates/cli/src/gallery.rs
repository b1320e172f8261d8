//! Scenarios shipped with the binary.

pub struct GalleryEntry {
    pub name: &'static str,
    pub text: &'static str,
}

macro_rules! entry {
    ($name:literal) => {
        GalleryEntry {
            name: $name,
            text: include_str!(concat!("../scenarios/", $name, ".yaml")),
        }
    };
}

pub const GALLERY: &[GalleryEntry] = &[
    entry!("matrix-counterexample"),
    entry!("interval-dense"),
    entry!("discrete-blocks"),
    entry!("toeplitz-fredholm"),
    entry!("toeplitz-pi"),
    entry!("parametric-laplacian"),
    entry!("observables"),
    entry!("empty"),
];

pub fn find(name: &str) -> Option<&'static GalleryEntry> {
    GALLERY.iter().find(|e| e.name == name)
}
