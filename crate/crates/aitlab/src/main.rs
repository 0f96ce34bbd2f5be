fn main() -> anyhow::Result<()> {
    aitlab::cli::run()
}
