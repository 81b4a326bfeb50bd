//! Run every reproduction experiment and print its checks.
use kernel_field::experiments::run_all;

fn main() -> kernel_field::Result<()> {
    for result in run_all()? {
        println!("{}", result.summary());
    }
    Ok(())
}
