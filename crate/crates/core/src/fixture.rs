//! Small histories with known ground truth: the upstream example commits
//! and a 12-commit demo repository. Both can be materialized as a real Git
//! repository or as an in-memory history.

use std::io;
use std::path::Path;
use std::process::Command;

use crate::miner::MemoryHistory;
use crate::taxonomy::{Operation, Pair, Target};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureCommit {
    pub message: String,
    pub timestamp: i64,
    /// Path and new content; `None` deletes the file.
    pub changes: Vec<(String, Option<String>)>,
}

/// One listing: a file before and after an upstream change.
#[derive(Debug, Clone, Copy)]
pub struct Listing {
    /// Abbreviated upstream commit id, used as the first word of the message.
    pub key: &'static str,
    pub title: &'static str,
    pub path: &'static str,
    pub before: &'static str,
    pub after: &'static str,
    /// Operation and target, for the listings that carry one.
    pub expected: Option<Pair>,
    /// Component labels of an expected multi verdict.
    pub components: &'static [Pair],
}

const BASE_TIME: i64 = 1_600_000_000;

const fn p(operation: Operation, target: Target) -> Pair {
    Pair { operation, target }
}

const BT878: &str = r#"EXPORT_SYMBOL(bt878_device_control);

struct cards card_list[] __devinitdata = {
	{ 0x001211bd, BTTV_BOARD_PINNACLESAT, "Pinnacle PCTV Sat" },
	{ 0x0001c001, BTTV_BOARD_TWINHAN_DST, "ChainTech digitop DST-1000 DVB-S" },
	{ 0, -1, NULL }
};
"#;

const NAMEI_BEFORE: &str = r#"int path_lookup_open(const char *name, unsigned int lookup_flags,
		struct nameidata *nd, int open_flags)
{
	return __path_lookup_intent_open(name, lookup_flags, nd, open_flags, 0);
}

int path_lookup_create(const char *name, unsigned int lookup_flags,
               struct nameidata *nd, int open_flags, int create_mode)
{
	return __path_lookup_intent_open(name, lookup_flags|LOOKUP_CREATE,
			nd, open_flags, create_mode);
}
"#;

const NAMEI_AFTER: &str = r#"int path_lookup_open(const char *name, unsigned int lookup_flags,
		struct nameidata *nd, int open_flags)
{
	return __path_lookup_intent_open(name, lookup_flags, nd, open_flags, 0);
}

static int path_lookup_create(const char *name, unsigned int lookup_flags,
                             struct nameidata *nd, int open_flags,
                             int create_mode)
{
	return __path_lookup_intent_open(name, lookup_flags|LOOKUP_CREATE,
			nd, open_flags, create_mode);
}
"#;

const TEST_BEFORE: &str = r#"void test(void);

int main(void)
{
	test();
	int flg = 10;
	return 0;
}
"#;

const TEST_AFTER: &str = r#"void test(void);

int main(void)
{
	test();
	static int flag = 10;
	return 0;
}
"#;

const DRVINFO_BEFORE: &str = r#"static void mlx4_en_get_drvinfo(struct net_device *dev,
				struct ethtool_drvinfo *drvinfo)
{
	struct mlx4_en_priv *priv = netdev_priv(dev);
	struct mlx4_en_dev *mdev = priv->mdev;

	strlcpy(drvinfo->driver, DRV_NAME, sizeof(drvinfo->driver));
	strlcpy(drvinfo->bus_info, pci_name(mdev->pdev),
		sizeof(drvinfo->bus_info));
}
"#;

const DRVINFO_AFTER: &str = r#"static void mlx4_en_get_drvinfo(struct net_device *dev,
				struct ethtool_drvinfo *drvinfo)
{
	struct mlx4_en_priv *priv = netdev_priv(dev);
	struct mlx4_en_dev *mdev = priv->mdev;

	strlcpy(drvinfo->driver, DRV_NAME, sizeof(drvinfo->driver));
	strlcpy(drvinfo->bus_info, dev_name(mdev->device),
		sizeof(drvinfo->bus_info));
}
"#;

const DQM_BEFORE: &str = r#"static void deallocate_hqd(struct device_queue_manager *dqm,
				struct queue *q)
{
	dqm->allocated_queues[q->pipe] |= (1 << q->queue);
	dqm->total_queue_count++;
}
"#;

const DQM_AFTER: &str = r#"static void deallocate_hqd(struct device_queue_manager *dqm,
				struct queue *q)
{
	dqm->allocated_queues[q->pipe] |= (1 << q->queue);
	dqm->total_queue_count--;
}
"#;

const EXTCON_BEFORE: &str = r#"/*
 * Properties of EXTCON_TYPE_USB.
 *
 * - EXTCON_PROP_USB_VBUS
 * @type:	integer (intval)
 * @value:	0 (low) or 1 (high)
 * @default:	0 (low)
 * - EXTCON_PROP_USB_TYPEC_POLARITY
 * @type:	integer (intval)
 * @value:	0 (normal) or 1 (flip)
 * @default:	0 (normal)
 *
 */
#define EXTCON_PROP_USB_VBUS		0
#define EXTCON_PROP_USB_TYPEC_POLARITY	1

#define EXTCON_PROP_USB_MIN		0
#define EXTCON_PROP_USB_MAX		1
#define EXTCON_PROP_USB_CNT	(EXTCON_PROP_USB_MAX - EXTCON_PROP_USB_MIN + 1)
"#;

const EXTCON_AFTER: &str = r#"/*
 * Properties of EXTCON_TYPE_USB.
 *
 * - EXTCON_PROP_USB_VBUS
 * @type:	integer (intval)
 * @value:	0 (low) or 1 (high)
 * @default:	0 (low)
 * - EXTCON_PROP_USB_TYPEC_POLARITY
 * @type:	integer (intval)
 * @value:	0 (normal) or 1 (flip)
 * @default:	0 (normal)
 * - EXTCON_PROP_USB_SS (SuperSpeed)
 * @type:       integer (intval)
 * @value:      0 (USB/USB2) or 1 (USB3)
 * @default:    0 (USB/USB2)
 *
 */
#define EXTCON_PROP_USB_VBUS		0
#define EXTCON_PROP_USB_TYPEC_POLARITY	1
#define EXTCON_PROP_USB_SS		2

#define EXTCON_PROP_USB_MIN		0
#define EXTCON_PROP_USB_MAX		2
#define EXTCON_PROP_USB_CNT	(EXTCON_PROP_USB_MAX - EXTCON_PROP_USB_MIN + 1)
"#;

const HFSPLUS_BEFORE: &str = r#"static int hfsplus_sync_fs(struct super_block *sb, int wait)
{
	struct hfsplus_sb_info *sbi = HFSPLUS_SB(sb);
	struct hfsplus_vh *vhdr = sbi->s_vhdr;
	int write_backup = 0;
	int error, error2;

	dprint(DBG_SUPER, "hfsplus_write_super\n");
	mutex_lock(&sbi->vh_mutex);
	mutex_lock(&sbi->alloc_mutex);
	return error;
}
"#;

const HFSPLUS_AFTER: &str = r#"static int hfsplus_sync_fs(struct super_block *sb, int wait)
{
	struct hfsplus_sb_info *sbi = HFSPLUS_SB(sb);
	struct hfsplus_vh *vhdr = sbi->s_vhdr;
	int write_backup = 0;
	int error, error2;

	dprint(DBG_SUPER, "hfsplus_sync_fs\n");
	mutex_lock(&sbi->vh_mutex);
	mutex_lock(&sbi->alloc_mutex);
	return error;
}
"#;

const PAGE_ALLOC_BEFORE: &str = r#"void * __meminit alloc_pages_exact_nid(int nid, size_t size, gfp_t gfp_mask)
{
	unsigned int order = get_order(size);
	struct page *p = alloc_pages_node(nid, gfp_mask, order);
	if (!p)
		return NULL;
	return make_alloc_exact((unsigned long)page_address(p), order, size);
}
EXPORT_SYMBOL(alloc_pages_exact_nid);

/**
 * free_pages_exact - release memory allocated via alloc_pages_exact()
 */
void free_pages_exact(void *virt, size_t size)
{
	unsigned long addr = (unsigned long)virt;
	unsigned long end = addr + PAGE_ALIGN(size);

	while (addr < end) {
		free_page(addr);
		addr += PAGE_SIZE;
	}
}
"#;

const PAGE_ALLOC_AFTER: &str = r#"void * __meminit alloc_pages_exact_nid(int nid, size_t size, gfp_t gfp_mask)
{
	unsigned int order = get_order(size);
	struct page *p = alloc_pages_node(nid, gfp_mask, order);
	if (!p)
		return NULL;
	return make_alloc_exact((unsigned long)page_address(p), order, size);
}

/**
 * free_pages_exact - release memory allocated via alloc_pages_exact()
 */
void free_pages_exact(void *virt, size_t size)
{
	unsigned long addr = (unsigned long)virt;
	unsigned long end = addr + PAGE_ALIGN(size);

	while (addr < end) {
		free_page(addr);
		addr += PAGE_SIZE;
	}
}
"#;

const MMAN_BEFORE: &str = r#"static int check_partial_mapping(struct drm_i915_gem_object *obj,
				 const struct tile *tile,
				 unsigned long end_time)
{
	unsigned long page;
	int err = 0;

	for_each_prime_number_from(page, 1, npages) {
		u32 __iomem *io;
		struct page *p;
		u32 *cpu;

		io = i915_vma_pin_iomap(vma);
		iowrite32(page, io + n * PAGE_SIZE / sizeof(*io));
		i915_vma_unpin_iomap(vma);

		p = i915_gem_object_get_page(obj, offset >> PAGE_SHIFT);
		cpu = kmap(p) + offset_in_page(offset);
		if (*cpu != (u32)page)
			err = -EINVAL;
		kunmap(p);
		if (err)
			return err;
	}

	return 0;
}
"#;

const MMAN_AFTER: &str = r#"static int check_partial_mapping(struct drm_i915_gem_object *obj,
				 const struct tile *tile,
				 unsigned long end_time)
{
	unsigned long page;
	int err = 0;

	for_each_prime_number_from(page, 1, npages) {
		u32 __iomem *io;
		struct page *p;
		u32 *cpu;

		io = i915_vma_pin_iomap(vma);
		iowrite32(page, io + n * PAGE_SIZE / sizeof(*io));
		i915_vma_unpin_iomap(vma);
		cond_resched();

		p = i915_gem_object_get_page(obj, offset >> PAGE_SHIFT);
		cpu = kmap(p) + offset_in_page(offset);
		if (*cpu != (u32)page)
			err = -EINVAL;
		kunmap(p);
		if (err)
			return err;
	}

	return 0;
}
"#;

const DWC3_BEFORE: &str = r#"static int __dwc3_gadget_ep_queue(struct dwc3_ep *dep, struct dwc3_request *req)
{
	struct dwc3 *dwc = dep->dwc;

	if (usb_endpoint_xfer_isoc(dep->endpoint.desc)) {
		if (list_empty(&dep->started_list)) {
			dwc3_stop_active_transfer(dwc, dep->number, true);
			dep->flags = DWC3_EP_ENABLED;
		}
		return 0;
	};

	return __dwc3_gadget_kick_transfer(dep, 0);
}
"#;

const DWC3_AFTER: &str = r#"static int __dwc3_gadget_ep_queue(struct dwc3_ep *dep, struct dwc3_request *req)
{
	struct dwc3 *dwc = dep->dwc;

	if (usb_endpoint_xfer_isoc(dep->endpoint.desc)) {
		if (list_empty(&dep->started_list)) {
			dwc3_stop_active_transfer(dwc, dep->number, true);
			dep->flags = DWC3_EP_ENABLED;
		}
		return 0;
	}

	return __dwc3_gadget_kick_transfer(dep, 0);
}
"#;

const VMCORE_BEFORE: &str = r#"static ssize_t read_vmcore(struct file *file, char __user *buffer,
			   size_t buflen, loff_t *fpos)
{
	return __read_vmcore((__force char *) buffer, buflen, fpos, 1);
}

/*
 * The vmcore fault handler uses the page cache and fills data using the
 * standard __vmcore_read() function.
 */
static int mmap_vmcore_fault(struct vm_fault *vmf)
{
	struct address_space *mapping = vmf->vma->vm_file->f_mapping;
	pgoff_t index = vmf->pgoff;

	return VM_FAULT_LOCKED;
}
"#;

const VMCORE_AFTER: &str = r#"static ssize_t read_vmcore(struct file *file, char __user *buffer,
			   size_t buflen, loff_t *fpos)
{
	return __read_vmcore((__force char *) buffer, buflen, fpos, 1);
}

/*
 * The vmcore fault handler uses the page cache and fills data using the
 * standard __vmcore_read() function.
 */
static vm_fault_t mmap_vmcore_fault(struct vm_fault *vmf)
{
	struct address_space *mapping = vmf->vma->vm_file->f_mapping;
	pgoff_t index = vmf->pgoff;

	return VM_FAULT_LOCKED;
}
"#;

const MTHCA_BEFORE: &str = r#"struct mthca_cmd_context {
	struct completion done;
	int               result;
	int               next;
	u64               out_param;
	u16               token;
	u8                status;
};

static int fw_cmd_doorbell = 1;
module_param(fw_cmd_doorbell, int, 0644);
MODULE_PARM_DESC(fw_cmd_doorbell, "post FW commands through doorbell page if nonzero "
		 "(and supported by FW)");
"#;

const MTHCA_AFTER: &str = r#"struct mthca_cmd_context {
	struct completion done;
	int               result;
	int               next;
	u64               out_param;
	u16               token;
	u8                status;
};

static int fw_cmd_doorbell = 0;
module_param(fw_cmd_doorbell, int, 0644);
MODULE_PARM_DESC(fw_cmd_doorbell, "post FW commands through doorbell page if nonzero "
		 "(and supported by FW)");
"#;

const PCIE_BEFORE: &str = r#"static irqreturn_t pcie_isr(int irq, void *dev_id)
{
	struct pcie_port *pp = dev_id;
	u32 status;

	status = readl(pp->base + PCIE_INT_STATUS);
	if (!(status & PCIE_INT_MASK))
			return IRQ_HANDLED;

	writel(status, pp->base + PCIE_INT_STATUS);
	return IRQ_HANDLED;
}
"#;

const PCIE_AFTER: &str = r#"static irqreturn_t pcie_isr(int irq, void *dev_id)
{
	struct pcie_port *pp = dev_id;
	u32 status;

	status = readl(pp->base + PCIE_INT_STATUS);
	if (!(status & PCIE_INT_MASK))
			return IRQ_NONE;

	writel(status, pp->base + PCIE_INT_STATUS);
	return IRQ_HANDLED;
}
"#;

const IR_BEFORE: &str = r#"static int ir_probe(struct i2c_client *client, const struct i2c_device_id *id)
{
	char *ir_codes = NULL;
	const char *name = NULL;
	unsigned short addr = client->addr;

	switch (addr) {
	case 0x64:
		name        = "Pixelview";
		ir_codes    = &ir_codes_empty;
		break;
	case 0x18:
	case 0x1a:
		name        = "Hauppauge";
		ir_codes    = &ir_codes_rc5_hauppauge_new;
	case 0x30:
		name        = "KNC One";
		ir_codes    = &ir_codes_empty;
		break;
	}
	return 0;
}
"#;

const IR_AFTER: &str = r#"static int ir_probe(struct i2c_client *client, const struct i2c_device_id *id)
{
	char *ir_codes = NULL;
	const char *name = NULL;
	unsigned short addr = client->addr;

	switch (addr) {
	case 0x64:
		name        = "Pixelview";
		ir_codes    = &ir_codes_empty;
		break;
	case 0x18:
	case 0x1a:
		name        = "Hauppauge";
		ir_codes    = &ir_codes_rc5_hauppauge_new;
		break;
	case 0x30:
		name        = "KNC One";
		ir_codes    = &ir_codes_empty;
		break;
	}
	return 0;
}
"#;

const NFS_BEFORE: &str = r#"static int nfs_parse_devname(const char *dev_name,
			     char **hostname, size_t maxnamlen,
			     char **export_path, size_t maxpathlen)
{
	size_t len;
	char *comma, *end;

	end = strchr(dev_name, ':');
	if (end == NULL)
		goto out_bad_devname;
	comma = strchr(dev_name, ',');
	if (comma != NULL && comma < end)
			*comma = 0;

	len = end - dev_name;
	if (len > maxnamlen)
		goto out_hostname;
	return 0;
}
"#;

const NFS_AFTER: &str = r#"static int nfs_parse_devname(const char *dev_name,
			     char **hostname, size_t maxnamlen,
			     char **export_path, size_t maxpathlen)
{
	size_t len;
	char *comma, *end;

	end = strchr(dev_name, ':');
	if (end == NULL)
		goto out_bad_devname;
	comma = strchr(dev_name, ',');
	if (comma != NULL && comma < end)
			len = comma - dev_name;

	len = end - dev_name;
	if (len > maxnamlen)
		goto out_hostname;
	return 0;
}
"#;

const IIO_BEFORE: &str = r#"int main(int argc, char **argv)
{
	char *data = NULL;
	char *buffer_access = NULL;
	int ret = 0;

	data = malloc(scan_size * buf_len);
	if (!data) {
		ret = -ENOMEM;
		goto error_free_buffer_access;
	}
	return 0;

error_free_data:
	free(data);
error_free_buffer_access:
	free(buffer_access);
	return ret;
}
"#;

const IIO_AFTER: &str = r#"int main(int argc, char **argv)
{
	char *data = NULL;
	char *buffer_access = NULL;
	int ret = 0;

	data = malloc(scan_size * buf_len);
	if (!data) {
		ret = -ENOMEM;
		goto error_free_buffer_access;
	}
	return 0;

error_free_buffer_access:
	free(buffer_access);
error_free_data:
	free(data);
	return ret;
}
"#;

const NAVBLOCK_BEFORE: &str = r#"package org.apache.hadoop.yarn.server.nodemanager.webapp;

public class ContainerLogsPage {
  @Override
  protected void render(Block html) {
    long start = $("start").isEmpty() ? -4 * 1024 : Long.parseLong($("start"));
    if (start > end) {
      html.h1()._("Invalid log start value: " + $("end"))._();
      return;
    }
  }
}
"#;

const NAVBLOCK_AFTER: &str = r#"package org.apache.hadoop.yarn.server.nodemanager.webapp;

public class ContainerLogsPage {
  @Override
  protected void render(Block html) {
    long start = $("start").isEmpty() ? -4 * 1024 : Long.parseLong($("start"));
    if (start > end) {
      html.h1()._("Invalid log end value: " + $("end"))._();
      return;
    }
  }
}
"#;

const EXTCON_PARTS: &[Pair] = &[
    p(Operation::Add, Target::Declaration),
    p(Operation::Replace, Target::Constant),
];
const MOVE_PARTS: &[Pair] = &[
    p(Operation::Add, Target::Statement),
    p(Operation::Remove, Target::Statement),
];

/// The three definition listings followed by the fourteen labeled ones.
pub fn listings() -> Vec<Listing> {
    use Operation::{Add, Remove, Replace};
    use Target::{Constant, ControlFlow, Declaration, Expression, Identifier, Statement};
    vec![
        Listing {
            key: "092734b4",
            title: "bt878: make card_list static",
            path: "drivers/media/dvb/bt8xx/bt878.c",
            before: BT878,
            after: "",
            expected: None,
            components: &[],
        },
        Listing {
            key: "0ce6e62b",
            title: "namei: make path_lookup_create static",
            path: "fs/namei.c",
            before: NAMEI_BEFORE,
            after: NAMEI_AFTER,
            expected: None,
            components: &[],
        },
        Listing {
            key: "line-repo",
            title: "test: rename flg and make it static",
            path: "test/test.c",
            before: TEST_BEFORE,
            after: TEST_AFTER,
            expected: None,
            components: &[],
        },
        Listing {
            key: "f72e6c3e",
            title: "mlx4_en: report bus info through dev_name",
            path: "drivers/net/ethernet/mellanox/mlx4/en_ethtool.c",
            before: DRVINFO_BEFORE,
            after: DRVINFO_AFTER,
            expected: Some(p(Replace, Identifier)),
            components: &[],
        },
        Listing {
            key: "8b58f261",
            title: "amdkfd: fix queue count when deallocating hqd",
            path: "drivers/gpu/drm/amd/amdkfd/kfd_device_queue_manager.c",
            before: DQM_BEFORE,
            after: DQM_AFTER,
            expected: Some(p(Replace, Expression)),
            components: &[],
        },
        Listing {
            key: "8df0cfe6",
            title: "extcon: add EXTCON_PROP_USB_SS property",
            path: "include/linux/extcon.h",
            before: EXTCON_BEFORE,
            after: EXTCON_AFTER,
            expected: Some(Pair::MULTI),
            components: EXTCON_PARTS,
        },
        Listing {
            key: "b7a90e80",
            title: "hfsplus: fix debug message in sync_fs",
            path: "fs/hfsplus/super.c",
            before: HFSPLUS_BEFORE,
            after: HFSPLUS_AFTER,
            expected: Some(p(Replace, Constant)),
            components: &[],
        },
        Listing {
            key: "b95b4e1e",
            title: "mm: drop export of alloc_pages_exact_nid",
            path: "mm/page_alloc.c",
            before: PAGE_ALLOC_BEFORE,
            after: PAGE_ALLOC_AFTER,
            expected: Some(p(Remove, Statement)),
            components: &[],
        },
        Listing {
            key: "12250368",
            title: "drm/i915/selftests: reschedule in check_partial_mapping",
            path: "drivers/gpu/drm/i915/selftests/i915_gem_object.c",
            before: MMAN_BEFORE,
            after: MMAN_AFTER,
            expected: Some(p(Add, Statement)),
            components: &[],
        },
        Listing {
            key: "a0925324",
            title: "usb: dwc3: gadget: drop stray semicolon",
            path: "drivers/usb/dwc3/gadget.c",
            before: DWC3_BEFORE,
            after: DWC3_AFTER,
            expected: Some(Pair::NO),
            components: &[],
        },
        Listing {
            key: "36f06204",
            title: "fs/proc/vmcore.c: use new return type vm_fault_t",
            path: "fs/proc/vmcore.c",
            before: VMCORE_BEFORE,
            after: VMCORE_AFTER,
            expected: Some(p(Replace, Declaration)),
            components: &[],
        },
        Listing {
            key: "1db76c14",
            title: "IB/mthca: disable doorbell commands by default",
            path: "drivers/infiniband/hw/mthca/mthca_cmd.c",
            before: MTHCA_BEFORE,
            after: MTHCA_AFTER,
            expected: Some(p(Replace, Constant)),
            components: &[],
        },
        Listing {
            key: "70e8b401",
            title: "PCI: return IRQ_NONE for foreign interrupts",
            path: "drivers/pci/host/pcie-spear13xx.c",
            before: PCIE_BEFORE,
            after: PCIE_AFTER,
            expected: Some(p(Replace, Identifier)),
            components: &[],
        },
        Listing {
            key: "415a1975",
            title: "ir-kbd-i2c: add missing break",
            path: "drivers/media/video/ir-kbd-i2c.c",
            before: IR_BEFORE,
            after: IR_AFTER,
            expected: Some(p(Add, ControlFlow)),
            components: &[],
        },
        Listing {
            key: "40cc394b",
            title: "NFS: do not overwrite the device name",
            path: "fs/nfs/super.c",
            before: NFS_BEFORE,
            after: NFS_AFTER,
            expected: Some(p(Replace, Expression)),
            components: &[],
        },
        Listing {
            key: "a71bfb4a",
            title: "iio: generic_buffer: fix cleanup order",
            path: "tools/iio/generic_buffer.c",
            before: IIO_BEFORE,
            after: IIO_AFTER,
            expected: Some(Pair::MULTI),
            components: MOVE_PARTS,
        },
        Listing {
            key: "c143708a",
            title: "YARN: fix error message for invalid log end",
            path: "hadoop-yarn/src/main/java/org/apache/hadoop/yarn/ContainerLogsPage.java",
            before: NAVBLOCK_BEFORE,
            after: NAVBLOCK_AFTER,
            expected: Some(p(Replace, Constant)),
            components: &[],
        },
    ]
}

impl Listing {
    /// Content after the change. The first listing only adds `static`.
    pub fn after_text(&self) -> String {
        if self.after.is_empty() {
            self.before
                .replacen("struct cards card_list", "static struct cards card_list", 1)
        } else {
            self.after.to_string()
        }
    }

    pub fn message(&self) -> String {
        format!("{} {}", self.key, self.title)
    }
}

/// The listing corpus as a history: one commit adding every `before` file,
/// then one commit per listing.
pub fn listing_history() -> Vec<FixtureCommit> {
    let all = listings();
    let mut out = vec![FixtureCommit {
        message: "Import listing sources".to_string(),
        timestamp: BASE_TIME,
        changes: all
            .iter()
            .map(|l| (l.path.to_string(), Some(l.before.to_string())))
            .collect(),
    }];
    for (i, l) in all.iter().enumerate() {
        out.push(FixtureCommit {
            message: l.message(),
            timestamp: BASE_TIME + 3600 * (i as i64 + 1),
            changes: vec![(l.path.to_string(), Some(l.after_text()))],
        });
    }
    out
}

const MAIN_V1: &str = r#"#include <stdio.h>
#include "util.h"

static int limit = 10;

int main(int argc, char **argv)
{
	int count = 0;
	int flg = 1;

	for (int i = 0; i < argc; i++) {
		count++;
		shout(argv[i]);
	}
	printf("%d of %d\n", count, limit);
	return 0;
}
"#;

const UTIL_V1: &str = r#"#include <stdio.h>
#include "util.h"

void shout(const char *s)
{
	printf("%s!\n", s);
}
"#;

/// Twelve commits: ten studied, three one-line, six micro, two one-token.
pub fn bundled_history() -> Vec<FixtureCommit> {
    let mut main = MAIN_V1.to_string();
    let mut util = UTIL_V1.to_string();
    let mut commits = Vec::new();
    let mut step = |message: &str, changes: Vec<(&str, Option<String>)>| {
        let n = commits.len() as i64;
        commits.push(FixtureCommit {
            message: message.to_string(),
            timestamp: BASE_TIME + 86_400 * n,
            changes: changes.into_iter().map(|(p, c)| (p.to_string(), c)).collect(),
        });
    };
    let edit = |text: &mut String, from: &str, to: &str| {
        assert!(text.contains(from), "fixture edit `{from}` does not apply");
        *text = text.replacen(from, to, 1);
        text.clone()
    };

    step(
        "Initial import",
        vec![
            ("src/main.c", Some(main.clone())),
            ("src/util.c", Some(util.clone())),
            ("README.md", Some("# demo\n".to_string())),
        ],
    );
    step(
        "Describe the demo",
        vec![("README.md", Some("# demo\n\nPrints its arguments.\n".to_string()))],
    );
    let m = edit(
        &mut main,
        "static int limit = 10;",
        "static int limit = 10; /* upper bound */",
    );
    step("Document the limit", vec![("src/main.c", Some(m))]);
    let m = edit(&mut main, "static int limit = 10;", "static int limit = 20;");
    step("Raise the limit", vec![("src/main.c", Some(m))]);
    let m = edit(&mut main, "\t\tcount++;", "\t\tcount--;");
    step("Fix counter direction", vec![("src/main.c", Some(m))]);
    let m = edit(&mut main, "\tint flg = 1;", "\tstatic int flag = 1;");
    step("Rename flg and keep it across calls", vec![("src/main.c", Some(m))]);
    let u = edit(
        &mut util,
        "\tprintf(\"%s!\\n\", s);\n",
        "\tprintf(\"%s!\\n\", s);\n\tfflush(stdout);\n",
    );
    step("Flush after shouting", vec![("src/util.c", Some(u))]);
    let u = edit(
        &mut util,
        "void shout(const char *s)\n",
        "static void\nshout(const char *s)\n",
    );
    step("Make shout static", vec![("src/util.c", Some(u))]);
    let m = edit(&mut main, "\t\tcount--;\n", "");
    step("Stop counting", vec![("src/main.c", Some(m))]);
    let u = edit(
        &mut util,
        "\tfflush(stdout);\n}\n",
        "\tfflush(stdout);\n}\n\nvoid whisper(const char *s)\n{\n\tprintf(\"%s...\\n\", s);\n}\n",
    );
    step("Add whisper", vec![("src/util.c", Some(u))]);
    let m = edit(&mut main, "\treturn 0;", "\treturn 1;");
    let u = edit(&mut util, "\"%s...\\n\"", "\"(%s)\\n\"");
    step(
        "Tweak exit code and whisper format",
        vec![("src/main.c", Some(m)), ("src/util.c", Some(u))],
    );
    let m = edit(
        &mut main,
        "\tprintf(\"%d of %d\\n\", count, limit);\n",
        "\tif (count > limit)\n\t\tfprintf(stderr, \"too many: %d\\n\", count);\n",
    );
    step("Warn when over the limit", vec![("src/main.c", Some(m))]);
    commits
}

pub fn to_memory(commits: &[FixtureCommit]) -> MemoryHistory {
    let mut h = MemoryHistory::new();
    for c in commits {
        let changes: Vec<(&str, Option<&str>)> = c.changes.iter().map(|(p, t)| (p.as_str(), t.as_deref())).collect();
        h.commit(&c.message, c.timestamp, &changes);
    }
    h
}

fn git(dir: &Path, args: &[&str], date: Option<i64>) -> io::Result<String> {
    let mut cmd = Command::new("git");
    cmd.arg("-C").arg(dir).args(args);
    cmd.env("GIT_AUTHOR_NAME", "Fixture")
        .env("GIT_AUTHOR_EMAIL", "fixture@example.org")
        .env("GIT_COMMITTER_NAME", "Fixture")
        .env("GIT_COMMITTER_EMAIL", "fixture@example.org")
        .env("GIT_CONFIG_NOSYSTEM", "1")
        .env("GIT_CONFIG_GLOBAL", "/dev/null");
    if let Some(ts) = date {
        let d = format!("@{ts} +0000");
        cmd.env("GIT_AUTHOR_DATE", &d).env("GIT_COMMITTER_DATE", &d);
    }
    let out = cmd.output()?;
    if !out.status.success() {
        return Err(io::Error::other(format!(
            "git {}: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr).trim()
        )));
    }
    Ok(String::from_utf8_lossy(&out.stdout).trim().to_string())
}

/// Writes `commits` into a new repository at `dir` and returns the commit
/// ids in order. Dates and identities are fixed, so ids are reproducible.
pub fn build_git_repo(dir: &Path, commits: &[FixtureCommit]) -> io::Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    git(dir, &["init", "-q"], None)?;
    let mut ids = Vec::new();
    for c in commits {
        for (path, content) in &c.changes {
            let target = dir.join(path);
            match content {
                Some(text) => {
                    if let Some(parent) = target.parent() {
                        std::fs::create_dir_all(parent)?;
                    }
                    std::fs::write(&target, text)?;
                }
                None => {
                    if target.exists() {
                        std::fs::remove_file(&target)?;
                    }
                }
            }
        }
        git(dir, &["add", "-A"], None)?;
        git(
            dir,
            &["commit", "-q", "--allow-empty", "--no-verify", "-m", &c.message],
            Some(c.timestamp),
        )?;
        ids.push(git(dir, &["rev-parse", "HEAD"], None)?);
    }
    Ok(ids)
}
