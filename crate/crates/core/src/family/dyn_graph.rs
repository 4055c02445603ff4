/// Mutable adjacency lists with bounded-depth searches that reuse their
/// scratch buffers.
#[derive(Debug, Clone)]
pub(crate) struct DynGraph {
    adj: Vec<Vec<usize>>,
    dist: Vec<u32>,
    stamp: Vec<u32>,
    epoch: u32,
    queue: Vec<usize>,
}

impl DynGraph {
    pub fn new(n: usize) -> Self {
        DynGraph { adj: vec![Vec::new(); n], dist: vec![0; n], stamp: vec![0; n], epoch: 0, queue: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.dist.push(0);
        self.stamp.push(0);
        self.adj.len() - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.adj[u].push(v);
        self.adj[v].push(u);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        if let Some(p) = self.adj[u].iter().position(|&w| w == v) {
            self.adj[u].swap_remove(p);
        }
        if let Some(p) = self.adj[v].iter().position(|&w| w == u) {
            self.adj[v].swap_remove(p);
        }
    }

    /// Vertices within distance `radius` of any source, in BFS order.
    pub fn ball(&mut self, sources: &[usize], radius: usize) -> &[usize] {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.queue.clear();
        for &s in sources {
            if self.stamp[s] != self.epoch {
                self.stamp[s] = self.epoch;
                self.dist[s] = 0;
                self.queue.push(s);
            }
        }
        let mut head = 0;
        while head < self.queue.len() {
            let x = self.queue[head];
            head += 1;
            if self.dist[x] as usize >= radius {
                continue;
            }
            for i in 0..self.adj[x].len() {
                let w = self.adj[x][i];
                if self.stamp[w] != self.epoch {
                    self.stamp[w] = self.epoch;
                    self.dist[w] = self.dist[x] + 1;
                    self.queue.push(w);
                }
            }
        }
        &self.queue
    }

    /// Whether `v` was reached by the last [`DynGraph::ball`] call.
    pub fn in_ball(&self, v: usize) -> bool {
        self.stamp[v] == self.epoch
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> =
            (0..self.n()).flat_map(|u| self.adj[u].iter().filter(move |&&v| u < v).map(move |&v| (u, v))).collect();
        e.sort_unstable();
        e
    }
}
