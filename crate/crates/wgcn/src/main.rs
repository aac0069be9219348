use wgcn::alloc_track::TrackingAllocator;

#[global_allocator]
static ALLOCATOR: TrackingAllocator = TrackingAllocator;

fn main() {
    std::process::exit(wgcn::cli::run());
}
