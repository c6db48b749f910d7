pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub toml: &'static str,
}

macro_rules! preset {
    ($name:literal, $summary:literal) => {
        Preset { name: $name, summary: $summary, toml: include_str!(concat!("../presets/", $name, ".toml")) }
    };
}

pub const PRESETS: &[Preset] = &[
    preset!("fig1b", "SK parity and parity phase error versus phi, thermal nbar=5"),
    preset!("fig1c", "Cramer-Rao phase error versus nbar at chi=pi/10, SK and CK"),
    preset!("fig2", "Fisher information per detection scheme versus phi, SK thermal nbar=5, eta_det=0.95"),
    preset!("fig3a", "QFI phase error versus arm loss, thermal nbar=10, SK and CK"),
    preset!("fig3b", "Hillery-Zubairy and Shchukin-Vogel witnesses versus chi, thermal nbar=5"),
    preset!("fig3c", "second-order coherence g2(0) versus chi, thermal nbar=5"),
    preset!("figS2", "Fisher information versus phi for coherent input, SK"),
    preset!("figS3", "maximal Fisher information versus detector efficiency, SK thermal nbar=5"),
    preset!("figS4", "parity Fisher information versus phi, SK and CK, thermal nbar=5"),
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
