use mono3d_core::io::{convert_omni3d, save_manifest, ConversionStats};

use crate::cli::ConvertArgs;
use crate::{CliError, Ui};

pub fn cmd_convert_omni3d(a: &ConvertArgs, ui: Ui) -> Result<ConversionStats, CliError> {
    let (manifest, stats) = convert_omni3d(&a.input)?;
    save_manifest(&manifest, &a.output)?;
    ui.progress(format!(
        "{} images, {} annotations ({} ignored, {} skipped) -> {}",
        stats.images,
        stats.annotations,
        stats.ignored,
        stats.skipped,
        a.output.display()
    ));
    Ok(stats)
}
