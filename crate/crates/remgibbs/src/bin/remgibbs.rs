fn main() { println!("remgibbs"); }
