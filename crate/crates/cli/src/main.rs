fn main() {
    // Die quietly when stdout is a closed pipe (`decaygraph rank ... | head`)
    // instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(decaygraph_cli::run());
}
