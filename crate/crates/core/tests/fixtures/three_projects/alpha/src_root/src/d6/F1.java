package fixture;

public class F1 {
    int m0(int a, int b) {
        return a;
    }
}
