// SPDX-License-Identifier: MIT OR Apache-2.0

use std::io;

fn main() {
    let code = lrd_cp::cli::parse_and_dispatch(
        std::env::args_os(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
